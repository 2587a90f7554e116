//! The fundamental system of `-y'' + q(x) y = μ y`.
//!
//! `c` and `s` are the solutions with `c(x0) = s'(x0) = 1`, `c'(x0) = s(x0) = 0`.
//! Everything is parameterized by `μ = λ²`: the integrated system is an
//! entire function of `μ`, so no square roots are taken anywhere in this
//! module except in the free-potential closed forms of [`free`].
//!
//! The `μ`-derivatives come from the variational system
//! `-v'' + (q - μ) v = y`, `v(x0) = v'(x0) = 0`, integrated jointly with the
//! solutions (eight complex components in total).

mod dopri;
pub mod free;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use dopri::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_steps_per_wave: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1e-2,
            min_steps_per_wave: 16,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::validation(name, format!("must lie in (0, 1e-2], got {v}")));
            }
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(Error::validation("max_step", "must be positive"));
        }
        if self.min_steps_per_wave < 8 {
            return Err(Error::validation("min_steps_per_wave", "must be at least 8"));
        }
        Ok(())
    }

    /// Step cap tying the step to the local wavelength `2π/√|μ|`.
    fn step_cap(&self, mu: Complex64) -> f64 {
        let wave = TAU / (self.min_steps_per_wave as f64 * mu.norm().sqrt().max(1.0));
        self.max_step.min(wave)
    }

    fn tolerances(&self, mu: Complex64) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_step: self.step_cap(mu),
        }
    }
}

/// `∂/∂μ` of `(c, c', s, s')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuDerivatives {
    pub dc: Complex64,
    pub dcp: Complex64,
    pub ds: Complex64,
    pub dsp: Complex64,
}

/// Values of the fundamental system at `x`, started from the identity at `x0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferState {
    pub x0: f64,
    pub x: f64,
    pub mu: Complex64,
    pub c: Complex64,
    pub cp: Complex64,
    pub s: Complex64,
    pub sp: Complex64,
    pub deriv: Option<MuDerivatives>,
}

impl TransferState {
    fn identity(x: f64, mu: Complex64, with_deriv: bool) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        TransferState {
            x0: x,
            x,
            mu,
            c: one,
            cp: zero,
            s: zero,
            sp: one,
            deriv: with_deriv.then_some(MuDerivatives {
                dc: zero,
                dcp: zero,
                ds: zero,
                dsp: zero,
            }),
        }
    }

    /// `c s' - c' s`, identically one for exact solutions.
    pub fn wronskian(&self) -> Complex64 {
        self.c * self.sp - self.cp * self.s
    }

    /// Transfer matrix `[[c, s], [c', s']]`, mapping `(y, y')(x0)` to `(y, y')(x)`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.c, self.s], [self.cp, self.sp]]
    }

    /// `c + s'`.
    pub fn trace(&self) -> Complex64 {
        self.c + self.sp
    }

    fn as_array(&self) -> [Complex64; 8] {
        let d = self.deriv.unwrap_or(MuDerivatives {
            dc: Complex64::new(0.0, 0.0),
            dcp: Complex64::new(0.0, 0.0),
            ds: Complex64::new(0.0, 0.0),
            dsp: Complex64::new(0.0, 0.0),
        });
        [self.c, self.cp, self.s, self.sp, d.dc, d.dcp, d.ds, d.dsp]
    }

    fn set_from(&mut self, y: &[Complex64]) {
        self.c = y[0];
        self.cp = y[1];
        self.s = y[2];
        self.sp = y[3];
        if y.len() == 8 {
            self.deriv = Some(MuDerivatives {
                dc: y[4],
                dcp: y[5],
                ds: y[6],
                dsp: y[7],
            });
        }
    }
}

/// Maximum entrywise difference of two transfer matrices.
pub fn matrix_distance(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// 2x2 complex matrix product.
pub fn matrix_product(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Continues `state` from `state.x` to `to`, splitting at the potential's
/// breakpoints so every integrated segment sees one smooth piece.
fn propagate(
    q: &PotentialSpec,
    state: &mut TransferState,
    to: f64,
    cfg: &IntegratorConfig,
) -> Result<()> {
    let mu = state.mu;
    let tol = cfg.tolerances(mu);
    let mut cuts = vec![state.x];
    cuts.extend(q.breakpoints_in(state.x, to));
    cuts.push(to);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let anchor = 0.5 * (a + b);
        if state.deriv.is_some() {
            let y0 = state.as_array();
            let y = dopri::integrate(
                |x, y: &[Complex64; 8]| {
                    let v = q.value_near(x, anchor) - mu;
                    [
                        y[1],
                        v * y[0],
                        y[3],
                        v * y[2],
                        y[5],
                        v * y[4] - y[0],
                        y[7],
                        v * y[6] - y[2],
                    ]
                },
                a,
                b,
                y0,
                tol,
            )?;
            state.set_from(&y);
        } else {
            let y0 = [state.c, state.cp, state.s, state.sp];
            let y = dopri::integrate(
                |x, y: &[Complex64; 4]| {
                    let v = q.value_near(x, anchor) - mu;
                    [y[1], v * y[0], y[3], v * y[2]]
                },
                a,
                b,
                y0,
                tol,
            )?;
            state.set_from(&y);
        }
        state.x = b;
    }
    Ok(())
}

fn check_range(x0: f64, x1: f64) -> Result<()> {
    if !(x0.is_finite() && x1.is_finite()) || x0 > x1 {
        return Err(Error::validation("x1", format!("need x0 <= x1, got {x0} > {x1}")));
    }
    if x0 < -1.0 || x1 > 2.0 {
        return Err(Error::validation(
            "x0",
            format!("interval [{x0}, {x1}] must lie in [-1, 2]"),
        ));
    }
    Ok(())
}

/// Integrates the fundamental system from `x0` (identity data) to `x1`.
pub fn transfer(
    q: &PotentialSpec,
    mu: Complex64,
    x0: f64,
    x1: f64,
    cfg: &IntegratorConfig,
    with_mu_derivative: bool,
) -> Result<TransferState> {
    check_range(x0, x1)?;
    let mut state = TransferState::identity(x0, mu, with_mu_derivative);
    propagate(q, &mut state, x1, cfg)?;
    Ok(state)
}

/// States at each of the sorted points `xs` (all `>= x0`) from one sweep.
pub fn transfer_path(
    q: &PotentialSpec,
    mu: Complex64,
    x0: f64,
    xs: &[f64],
    cfg: &IntegratorConfig,
    with_mu_derivative: bool,
) -> Result<Vec<TransferState>> {
    if let Some(&last) = xs.last() {
        check_range(x0, last)?;
    }
    if xs.windows(2).any(|w| w[0] > w[1]) || xs.first().is_some_and(|&x| x < x0) {
        return Err(Error::validation("xs", "points must be sorted and not below x0"));
    }
    let mut state = TransferState::identity(x0, mu, with_mu_derivative);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        propagate(q, &mut state, x, cfg)?;
        out.push(state);
    }
    Ok(out)
}

/// Transfer over one period, `[0, 1]`.
pub fn monodromy(
    q: &PotentialSpec,
    mu: Complex64,
    cfg: &IntegratorConfig,
    with_mu_derivative: bool,
) -> Result<TransferState> {
    transfer(q, mu, 0.0, 1.0, cfg, with_mu_derivative)
}

/// Transfer over `[0, 1/2]`.
pub fn half_transfer(
    q: &PotentialSpec,
    mu: Complex64,
    cfg: &IntegratorConfig,
    with_mu_derivative: bool,
) -> Result<TransferState> {
    transfer(q, mu, 0.0, 0.5, cfg, with_mu_derivative)
}

/// `Δ(μ) = c(1, μ) + s'(1, μ)` and optionally `dΔ/dμ`.
pub fn discriminant(
    q: &PotentialSpec,
    mu: Complex64,
    cfg: &IntegratorConfig,
    with_derivative: bool,
) -> Result<(Complex64, Option<Complex64>)> {
    let m = monodromy(q, mu, cfg, with_derivative)?;
    let d = m.deriv.map(|d| d.dc + d.dsp);
    Ok((m.trace(), d))
}

/// `(c, c', s, s')` at `x ∈ [-1, 2]` for data given at 0; negative `x` is
/// reached by inverting the transfer from `x` to 0.
pub fn fundamental_at(
    q: &PotentialSpec,
    mu: Complex64,
    x: f64,
    cfg: &IntegratorConfig,
) -> Result<TransferState> {
    if x >= 0.0 {
        return transfer(q, mu, 0.0, x, cfg, false);
    }
    let back = transfer(q, mu, x, 0.0, cfg, false)?;
    // inverse of a unimodular 2x2 matrix
    Ok(TransferState {
        x0: 0.0,
        x,
        mu,
        c: back.sp,
        cp: -back.cp,
        s: -back.s,
        sp: back.c,
        deriv: None,
    })
}

/// The pair normalized at `x = 1/2`:
/// `y1 = s'(1/2) c - c'(1/2) s`, `y2 = c(1/2) s - s(1/2) c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryPair {
    pub y1: Complex64,
    pub y1p: Complex64,
    pub y2: Complex64,
    pub y2p: Complex64,
}

impl AuxiliaryPair {
    pub fn wronskian(&self) -> Complex64 {
        self.y1 * self.y2p - self.y1p * self.y2
    }
}

pub fn auxiliary_pair(
    q: &PotentialSpec,
    mu: Complex64,
    x: f64,
    cfg: &IntegratorConfig,
) -> Result<AuxiliaryPair> {
    let h = half_transfer(q, mu, cfg, false)?;
    let f = fundamental_at(q, mu, x, cfg)?;
    Ok(AuxiliaryPair {
        y1: h.sp * f.c - h.cp * f.s,
        y1p: h.sp * f.cp - h.cp * f.sp,
        y2: h.c * f.s - h.s * f.c,
        y2p: h.c * f.sp - h.s * f.cp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig {
            rel_tol: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig {
            min_steps_per_wave: 4,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn identity_at_start() {
        let cfg = IntegratorConfig::default();
        let q = PotentialSpec::cosine(1, 1.0);
        let t = transfer(&q, c(3.0, 1.0), 0.3, 0.3, &cfg, true).unwrap();
        assert_eq!(t.c, c(1.0, 0.0));
        assert_eq!(t.sp, c(1.0, 0.0));
        assert_eq!(t.cp, c(0.0, 0.0));
        assert_eq!(t.s, c(0.0, 0.0));
        let d = t.deriv.unwrap();
        assert_eq!([d.dc, d.dcp, d.ds, d.dsp], [c(0.0, 0.0); 4]);
    }

    #[test]
    fn free_potential_at_pi_squared() {
        let cfg = IntegratorConfig::default();
        let t = monodromy(&PotentialSpec::zero(), c(PI * PI, 0.0), &cfg, false).unwrap();
        assert!((t.c - c(-1.0, 0.0)).norm() < 1e-9);
        assert!(t.cp.norm() < 1e-9);
        assert!(t.s.norm() < 1e-9);
        assert!((t.sp - c(-1.0, 0.0)).norm() < 1e-9);
        let z = monodromy(&PotentialSpec::zero(), c(0.0, 0.0), &cfg, false).unwrap();
        assert!((z.s - c(1.0, 0.0)).norm() < 1e-12);
        assert!((z.c - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_potential_mu_derivative_vanishes_at_pi_squared() {
        // c = cos(√(μ-a) x); ∂μ c = -x sin(√(μ-a) x) / (2√(μ-a)) = 0 at μ - a = π², x = 1
        let a = c(2.0, 0.5);
        let cfg = IntegratorConfig::default();
        let t = monodromy(&PotentialSpec::constant(a), a + PI * PI, &cfg, true).unwrap();
        assert!(t.deriv.unwrap().dc.norm() < 1e-9);
        assert!((t.c + 1.0).norm() < 1e-9);
    }

    #[test]
    fn branch_confluence_point() {
        // q = π²/4, μ = π²/4: c = 1, s = x
        let q = PotentialSpec::constant(c(PI * PI / 4.0, 0.0));
        let t = monodromy(&q, c(PI * PI / 4.0, 0.0), &IntegratorConfig::default(), false).unwrap();
        assert!((t.c - 1.0).norm() < 1e-10);
        assert!((t.s - 1.0).norm() < 1e-10);
    }

    #[test]
    fn discriminant_of_free_potential() {
        let cfg = IntegratorConfig::default();
        let (d, dd) = discriminant(&PotentialSpec::zero(), c(4.0 * PI * PI, 0.0), &cfg, true).unwrap();
        assert!((d - 2.0).norm() < 1e-9);
        assert!(dd.unwrap().norm() < 1e-9);
        let (d, _) = discriminant(&PotentialSpec::zero(), c(PI * PI / 4.0, 0.0), &cfg, false).unwrap();
        assert!(d.norm() < 1e-9);
    }

    #[test]
    fn auxiliary_pair_examples() {
        let cfg = IntegratorConfig::default();
        let q = PotentialSpec::sine(1, 0.7).shifted(c(0.0, 0.4));
        let p = auxiliary_pair(&q, c(5.0, 2.0), 0.5, &cfg).unwrap();
        assert!((p.y1 - 1.0).norm() < 1e-10);
        assert!(p.y1p.norm() < 1e-12);
        assert!(p.y2.norm() < 1e-12);
        assert!((p.y2p - 1.0).norm() < 1e-10);

        let p = auxiliary_pair(&PotentialSpec::zero(), c(0.0, 0.0), 0.0, &cfg).unwrap();
        assert!((p.y1 - 1.0).norm() < 1e-12);
        assert!((p.y2 + 0.5).norm() < 1e-12);

        // free: y1 = cos λ(x - 1/2), y2 = sin λ(x - 1/2)/λ at μ = π², x = 0
        let p = auxiliary_pair(&PotentialSpec::zero(), c(PI * PI, 0.0), 0.0, &cfg).unwrap();
        assert!(p.y1.norm() < 1e-9);
        assert!((p.y1p - PI).norm() < 1e-9);
        assert!((p.y2 + 1.0 / PI).norm() < 1e-9);
        assert!(p.y2p.norm() < 1e-9);
        assert!((p.wronskian() - 1.0).norm() < 1e-9);

        let p = auxiliary_pair(&q, c(5.0, 2.0), -0.4, &cfg).unwrap();
        assert!((p.wronskian() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn range_is_checked() {
        let cfg = IntegratorConfig::default();
        let q = PotentialSpec::zero();
        assert!(transfer(&q, c(1.0, 0.0), 0.5, 0.2, &cfg, false).is_err());
        assert!(transfer(&q, c(1.0, 0.0), 0.0, 2.5, &cfg, false).is_err());
    }
}
