//! Even/odd decompositions and the residuals of the potential conditions.
//!
//! All residuals are evaluated on the uniform grid `x_j = j / grid_n`. The
//! half-interval quantities use the nodes in `[0, 1/2]`, so the reflection
//! `x -> 1/2 - x` maps grid nodes onto grid nodes (and `x -> 1 - x` likewise
//! on `[0, 1]`). The parity identities of a decomposition therefore hold
//! exactly at the nodes, and between nodes the linear interpolation error is
//! at most `h^2/8 · max|q''|`.
//!
//! The inner integral `∫_b^x q2` is accumulated right to left from the base
//! point `b` over grid cells; each cell integral uses 4-point Gauss-Legendre
//! on the potential's own piece (identical to the trapezoid rule for sampled
//! potentials). Outer norms use the composite trapezoid rule, error `O(h^2)`.

use super::{PotentialSpec, Span};
use crate::quadrature::{gauss_legendre4, trapezoid_real};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    L2,
    Sup,
}

impl Norm {
    pub(crate) fn measure(self, values: &[f64], step: f64) -> f64 {
        match self {
            Norm::Sup => values.iter().copied().fold(0.0, f64::max),
            Norm::L2 => {
                let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
                trapezoid_real(&sq, step).max(0.0).sqrt()
            }
        }
    }
}

/// `q = q1 + q2` with `q1` even and `q2` odd under the reflection of the span
/// (`x -> 1/2 - x` for the half span, `x -> 1 - x` for the unit span),
/// sampled on the grid nodes of that span.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub span: Span,
    pub step: f64,
    pub nodes: Vec<f64>,
    pub q: Vec<Complex64>,
    pub q1: Vec<Complex64>,
    pub q2: Vec<Complex64>,
}

pub type HalfDecomposition = Decomposition;
pub type UnitDecomposition = Decomposition;

impl Decomposition {
    fn interpolate(&self, values: &[Complex64], x: f64) -> Complex64 {
        let n = values.len() - 1;
        let s = (x / self.step).clamp(0.0, n as f64);
        let k = (s.floor() as usize).min(n.saturating_sub(1));
        let t = s - k as f64;
        values[k] + (values[k + 1] - values[k]) * t
    }

    /// Even part at an arbitrary `x` of the span (linear interpolation).
    pub fn q1_at(&self, x: f64) -> Complex64 {
        self.interpolate(&self.q1, x)
    }

    /// Odd part at an arbitrary `x` of the span (linear interpolation).
    pub fn q2_at(&self, x: f64) -> Complex64 {
        self.interpolate(&self.q2, x)
    }
}

fn span_nodes(q: &PotentialSpec, span: Span) -> usize {
    match span {
        Span::Half => q.grid_n() / 2,
        Span::Unit => q.grid_n(),
    }
}

pub fn decompose(q: &PotentialSpec, span: Span) -> Decomposition {
    let m = span_nodes(q, span);
    let step = 1.0 / q.grid_n() as f64;
    let values = q.node_values(m);
    let q1 = (0..=m).map(|j| 0.5 * (values[j] + values[m - j])).collect();
    let q2 = (0..=m).map(|j| 0.5 * (values[j] - values[m - j])).collect();
    Decomposition {
        span,
        step,
        nodes: (0..=m).map(|j| j as f64 * step).collect(),
        q: values,
        q1,
        q2,
    }
}

/// `q1(x) = (q(x) + q(1/2 - x))/2`, `q2(x) = (q(x) - q(1/2 - x))/2` on `[0, 1/2]`.
pub fn decompose_half(q: &PotentialSpec) -> HalfDecomposition {
    decompose(q, Span::Half)
}

/// `q1(x) = (q(x) + q(1 - x))/2`, `q2(x) = (q(x) - q(1 - x))/2` on `[0, 1]`.
pub fn decompose_unit(q: &PotentialSpec) -> UnitDecomposition {
    decompose(q, Span::Unit)
}

/// Cell integrals of `q` over `[x_k, x_{k+1}]`, `k < m`.
fn cell_integrals(q: &PotentialSpec, m: usize) -> Vec<Complex64> {
    let h = 1.0 / q.grid_n() as f64;
    (0..m)
        .map(|k| {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            let mid = 0.5 * (a + b);
            gauss_legendre4(|x| q.value_near(x, mid), a, b)
        })
        .collect()
}

/// Pointwise residual `q1(x_j) - (∫_{b}^{x_j} q2)^2` with `b` the right end
/// of the span.
fn condition_residuals(q: &PotentialSpec, span: Span) -> (Vec<f64>, f64) {
    let dec = decompose(q, span);
    let m = dec.nodes.len() - 1;
    let cells = cell_integrals(q, m);
    // the reflection maps cell k onto cell m-1-k
    let odd_cells: Vec<Complex64> = (0..m)
        .map(|k| 0.5 * (cells[k] - cells[m - 1 - k]))
        .collect();
    let mut inner = vec![Complex64::new(0.0, 0.0); m + 1];
    for j in (0..m).rev() {
        inner[j] = inner[j + 1] - odd_cells[j];
    }
    let res = (0..=m)
        .map(|j| (dec.q1[j] - inner[j] * inner[j]).norm())
        .collect();
    (res, dec.step)
}

/// `‖q1(x) - (∫_{1/2}^{x} q2(t) dt)^2‖` over `[0, 1/2]`.
pub fn residual_condition_b(q: &PotentialSpec, norm: Norm) -> f64 {
    let (r, h) = condition_residuals(q, Span::Half);
    norm.measure(&r, h)
}

/// `‖q1(x) - (∫_{1}^{x} q2(t) dt)^2‖` over `[0, 1]`.
pub fn residual_condition_bb(q: &PotentialSpec, norm: Norm) -> f64 {
    let (r, h) = condition_residuals(q, Span::Unit);
    norm.measure(&r, h)
}

/// `‖q(x) - q(1/2 - x)‖` on `[0, 1/2]` or `‖q(x) - q(1 - x)‖` on `[0, 1]`.
pub fn residual_symmetry(q: &PotentialSpec, span: Span, norm: Norm) -> f64 {
    let dec = decompose(q, span);
    let r: Vec<f64> = dec.q2.iter().map(|v| 2.0 * v.norm()).collect();
    norm.measure(&r, dec.step)
}

/// Default verdict tolerance: `1e-8` for analytic kinds, `10 h^2` for sampled.
pub fn default_condition_tolerance(q: &PotentialSpec) -> f64 {
    if q.is_sampled() {
        let h = 1.0 / q.grid_n() as f64;
        10.0 * h * h
    } else {
        1e-8
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdicts {
    pub condition_b: bool,
    pub condition_bb: bool,
    pub symmetry_half: bool,
    pub symmetry_unit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub residual_b: f64,
    pub residual_bb: f64,
    pub residual_sym_half: f64,
    pub residual_sym_unit: f64,
    pub norm_used: Norm,
    pub tolerance: f64,
    pub verdicts: ConditionVerdicts,
}

impl ConditionReport {
    /// Verdicts recomputed from the stored residuals.
    pub fn recompute_verdicts(&self) -> ConditionVerdicts {
        ConditionVerdicts {
            condition_b: self.residual_b < self.tolerance,
            condition_bb: self.residual_bb < self.tolerance,
            symmetry_half: self.residual_sym_half < self.tolerance,
            symmetry_unit: self.residual_sym_unit < self.tolerance,
        }
    }
}

pub fn condition_report(q: &PotentialSpec, norm: Norm, tolerance: Option<f64>) -> ConditionReport {
    let tolerance = tolerance.unwrap_or_else(|| default_condition_tolerance(q));
    let mut report = ConditionReport {
        residual_b: residual_condition_b(q, norm),
        residual_bb: residual_condition_bb(q, norm),
        residual_sym_half: residual_symmetry(q, Span::Half, norm),
        residual_sym_unit: residual_symmetry(q, Span::Unit, norm),
        norm_used: norm,
        tolerance,
        verdicts: ConditionVerdicts {
            condition_b: false,
            condition_bb: false,
            symmetry_half: false,
            symmetry_unit: false,
        },
    };
    report.verdicts = report.recompute_verdicts();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Polynomial;
    use std::f64::consts::PI;

    #[test]
    fn decompositions_of_trig_potentials() {
        let sin = PotentialSpec::sine(1, 1.0);
        let d = decompose_half(&sin);
        for (j, x) in d.nodes.iter().enumerate() {
            assert!((d.q1[j].re - (2.0 * PI * x).sin()).abs() < 1e-14);
            assert!(d.q2[j].norm() < 1e-14);
        }
        let u = decompose_unit(&sin);
        assert!(u.q1.iter().all(|v| v.norm() < 1e-14));

        let cos = PotentialSpec::cosine(1, 1.0);
        let d = decompose_half(&cos);
        assert!(d.q1.iter().all(|v| v.norm() < 1e-14));
        assert!((d.q2_at(0.1).re - (0.2 * PI).cos()).abs() < 1e-4);
        let u = decompose_unit(&cos);
        assert!(u.q2.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn zero_potential_has_zero_residuals() {
        let r = condition_report(&PotentialSpec::zero(), Norm::L2, None);
        assert_eq!(r.residual_b, 0.0);
        assert_eq!(r.residual_bb, 0.0);
        assert_eq!(r.residual_sym_half, 0.0);
        assert_eq!(r.residual_sym_unit, 0.0);
        assert!(r.verdicts.condition_b && r.verdicts.symmetry_unit);
    }

    #[test]
    fn sine_fails_condition_b_with_half_l2_norm() {
        // q2 = 0 so the residual is ‖sin 2πx‖ on [0, 1/2] = 1/2
        let r = residual_condition_b(&PotentialSpec::sine(1, 1.0), Norm::L2);
        assert!((r - 0.5).abs() < 1e-12, "{r}");
        let sup = residual_condition_b(&PotentialSpec::sine(1, 1.0), Norm::Sup);
        assert!((sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sine_condition_bb_matches_symbolic_oracle() {
        // q1 = 0, ∫_1^x sin 2πt dt = (cos 2πx - 1)/2π, residual ‖((1 - cos 2πx)/2π)^2‖
        let q = PotentialSpec::sine(1, 1.0).with_grid_n(1024);
        let n = 4096;
        let vals: Vec<f64> = (0..=n)
            .map(|j| {
                let x = j as f64 / n as f64;
                ((1.0 - (2.0 * PI * x).cos()) / (2.0 * PI)).powi(2)
            })
            .collect();
        let want = Norm::L2.measure(&vals, 1.0 / n as f64);
        let got = residual_condition_bb(&q, Norm::L2);
        assert!(got > 0.01);
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
    }

    #[test]
    fn polynomial_pairs_satisfy_conditions() {
        // q2 = 16(x - 1/4), q1 = (8(x - 1/4)^2 - 1/2)^2 on [0, 1/2]
        let u = Polynomial::from_real(&[1.0, -0.25]);
        let q2 = u.scale(Complex64::new(16.0, 0.0));
        let f = u.mul(&u).scale(Complex64::new(8.0, 0.0)).add(&Polynomial::from_real(&[-0.5]));
        let q = PotentialSpec::polynomial_piece(f.mul(&f).add(&q2), Span::Half);
        assert!(residual_condition_b(&q, Norm::L2) < 1e-12);
        assert!(residual_condition_b(&q, Norm::Sup) < 1e-12);

        // unit analog: q2 = 4(x - 1/2), q1 = (2(x - 1/2)^2 - 1/2)^2 on [0, 1]
        let u = Polynomial::from_real(&[1.0, -0.5]);
        let q2 = u.scale(Complex64::new(4.0, 0.0));
        let f = u.mul(&u).scale(Complex64::new(2.0, 0.0)).add(&Polynomial::from_real(&[-0.5]));
        let q = PotentialSpec::polynomial_piece(f.mul(&f).add(&q2), Span::Unit);
        assert!(residual_condition_bb(&q, Norm::L2) < 1e-12);
    }

    #[test]
    fn symmetry_residuals() {
        let k = PotentialSpec::constant(Complex64::new(3.0, -1.0));
        assert!(residual_symmetry(&k, Span::Half, Norm::L2) < 1e-15);
        assert!(residual_symmetry(&k, Span::Unit, Norm::Sup) < 1e-15);
        let s = PotentialSpec::sine(1, 1.0);
        assert!(residual_symmetry(&s, Span::Half, Norm::L2) < 1e-14);
        assert!(residual_symmetry(&s, Span::Unit, Norm::L2) > 0.5);
        let c = PotentialSpec::cosine(1, 1.0);
        assert!(residual_symmetry(&c, Span::Half, Norm::L2) > 0.5);
        assert!(residual_symmetry(&c, Span::Unit, Norm::L2) < 1e-14);
    }

    #[test]
    fn sampled_tolerance_scales_with_grid() {
        let v = vec![Complex64::new(0.0, 0.0); 65];
        let q = PotentialSpec::samples(v).unwrap();
        assert!((default_condition_tolerance(&q) - 10.0 / 4096.0).abs() < 1e-15);
        assert_eq!(default_condition_tolerance(&PotentialSpec::zero()), 1e-8);
    }
}
