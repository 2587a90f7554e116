//! Closed forms for constant potentials, written as entire functions of `μ`.
//!
//! For `q ≡ a` the fundamental system is `c = cos(√(μ-a) x)`,
//! `s = sin(√(μ-a) x)/√(μ-a)`; both are even in the square root, so the
//! principal branch is as good as any.

use num_complex::Complex64;

/// `cos(√μ x)`.
pub fn cos_sqrt(mu: Complex64, x: f64) -> Complex64 {
    (mu.sqrt() * x).cos()
}

/// `sin(√μ x)/√μ`, with the limit `x` at `μ = 0`.
pub fn sinc_sqrt(mu: Complex64, x: f64) -> Complex64 {
    let z = mu * x * x;
    if z.norm() < 1e-6 {
        // x (1 - z/6 + z²/120)
        return x * (1.0 - z / 6.0 + z * z / 120.0);
    }
    let r = mu.sqrt();
    (r * x).sin() / r
}

/// `d/dx cos(√μ x) = -μ sin(√μ x)/√μ`.
pub fn cos_sqrt_dx(mu: Complex64, x: f64) -> Complex64 {
    -mu * sinc_sqrt(mu, x)
}

/// Discriminant of the constant potential `a`: `2 cos √(μ - a)`.
pub fn constant_discriminant(a: Complex64, mu: Complex64) -> Complex64 {
    2.0 * cos_sqrt(mu - a, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_is_continuous_at_zero() {
        let x = 0.7;
        let tiny = Complex64::new(1e-9, 1e-9);
        let a = sinc_sqrt(tiny, x);
        let b = sinc_sqrt(Complex64::new(1e-4, 0.0), x);
        assert!((a - x).norm() < 1e-9);
        assert!((b - (1e-2f64 * x).sin() / 1e-2).norm() < 1e-14);
        // evenness in the root: (-r)² = r²
        let mu = Complex64::new(-3.0, 4.0);
        let r = mu.sqrt();
        assert!((sinc_sqrt(mu, x) - (-r * x).sin() / (-r)).norm() < 1e-14);
    }
}
