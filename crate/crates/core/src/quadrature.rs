//! Small quadrature helpers shared by the potential and kernel code.

use num_complex::Complex64;

// 4-point Gauss-Legendre nodes and weights on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Integrates `f` over `[a, b]` with 4-point Gauss-Legendre (exact for cubics,
/// hence for piecewise-linear sample data).
pub fn gauss_legendre4(f: impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, weight) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
        acc += f(mid + half * node) * *weight;
    }
    acc * half
}

/// Composite trapezoid on equally spaced samples.
pub fn trapezoid(values: &[Complex64], step: f64) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let inner: Complex64 = values[1..n - 1].iter().sum();
            (inner + 0.5 * (values[0] + values[n - 1])) * step
        }
    }
}

/// Composite trapezoid of real samples.
pub fn trapezoid_real(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])) * step,
    }
}
