//! The transformation kernel `K(x, t)` on `Ω = {0 ≤ x ≤ 1, -x ≤ t ≤ x}`.
//!
//! `K` solves `K_xx - K_tt = q(x) K` with `K(x, x) = ½∫₀ˣ q` and
//! `K(x, -x) = 0`, and turns free solutions into solutions of the Hill
//! equation:
//!
//! ```text
//! c(x) = cos(λx) + ∫_{-x}^{x} K(x, t) cos(λt) dt
//! s(x) = sin(λx)/λ + ∫_{-x}^{x} K(x, t) sin(λt)/λ dt
//! ```
//!
//! In characteristic coordinates `ξ = (x + t)/2`, `η = (x - t)/2` the function
//! `u(ξ, η) = K(ξ + η, ξ - η)` satisfies `u_ξη = q(ξ + η) u` (with this
//! scaling of the coordinates there is no factor ¼), so
//!
//! ```text
//! u(ξ, η) = ½∫₀^ξ q + ∫₀^ξ ∫₀^η q(α + β) u(α, β) dβ dα,
//! ```
//!
//! which is solved by successive approximation on the nodes
//! `(ξ, η) = (i h, j h)`, `i + j ≤ n`, `h = 1/n`.

use crate::error::{Error, Result};
use crate::ode::{self, free, IntegratorConfig};
use crate::potential::PotentialSpec;
use crate::quadrature::{gauss_legendre4, trapezoid};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt::Write;

pub const DEFAULT_MESH: usize = 256;
pub const DEFAULT_PICARD_TOL: f64 = 1e-10;
pub const MAX_PICARD_ITERATIONS: usize = 50;

/// Kernel values on the characteristic mesh.
#[derive(Clone, Debug)]
pub struct KernelGrid {
    n: usize,
    /// `rows[i][j] = u(i h, j h)` for `j ≤ n - i`.
    rows: Vec<Vec<Complex64>>,
    q_ref: PotentialSpec,
    iterations: usize,
    last_update: f64,
}

impl KernelGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.q_ref
    }

    /// Picard sweeps performed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Sup-difference of the last two iterates.
    pub fn last_update(&self) -> f64 {
        self.last_update
    }

    /// `K(x_m, t_k)` with `x_m = m/n` and `t_k = (2k - m)/n`, `0 ≤ k ≤ m`.
    pub fn at(&self, m: usize, k: usize) -> Complex64 {
        assert!(m <= self.n && k <= m, "node ({m}, {k}) outside the mesh");
        self.rows[k][m - k]
    }

    /// `(t_k, K(x_m, t_k))` for `k = 0..=m`, `t` increasing.
    pub fn slice(&self, m: usize) -> Vec<(f64, Complex64)> {
        let h = 1.0 / self.n as f64;
        (0..=m)
            .map(|k| ((2.0 * k as f64 - m as f64) * h, self.at(m, k)))
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Mesh index of `x`, if `x` is a node.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let m = (x * self.n as f64).round();
        ((x * self.n as f64 - m).abs() < 1e-9 && (0.0..=self.n as f64).contains(&m))
            .then_some(m as usize)
    }

    /// Rows `x, t, re_K, im_K` with a header row, `x` increasing, then `t`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,t,re_K,im_K\n");
        let h = 1.0 / self.n as f64;
        for m in 0..=self.n {
            for (t, k) in self.slice(m) {
                let _ = writeln!(out, "{:.10e},{:.10e},{:.15e},{:.15e}", m as f64 * h, t, k.re, k.im);
            }
        }
        out
    }
}

/// `q` at the mesh points `m/n`; at a jump the mean of the one-sided limits.
fn mesh_potential(q: &PotentialSpec, n: usize) -> Vec<Complex64> {
    let h = 1.0 / n as f64;
    (0..=n)
        .map(|m| {
            let x = m as f64 * h;
            let right = q.value_near(x, x + 0.5 * h);
            let left = q.value_near(x, x - 0.5 * h);
            match m {
                0 => right,
                _ if m == n => left,
                _ => 0.5 * (left + right),
            }
        })
        .collect()
}

/// `½∫₀^{m h} q` for `m = 0..=n`, cellwise Gauss-Legendre.
fn half_primitive(q: &PotentialSpec, n: usize) -> Vec<Complex64> {
    let h = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for m in 0..n {
        let (a, b) = (m as f64 * h, (m + 1) as f64 * h);
        let mid = 0.5 * (a + b);
        acc += 0.5 * gauss_legendre4(|x| q.value_near(x, mid), a, b);
        out.push(acc);
    }
    out
}

/// Solves the Goursat problem on an `n`-cell mesh by successive
/// approximation, stopping when two iterates differ by less than
/// `picard_tol` in sup norm.
pub fn solve_goursat(q: &PotentialSpec, n: usize, picard_tol: f64) -> Result<KernelGrid> {
    if n < 16 {
        return Err(Error::validation("n", format!("mesh must have at least 16 cells, got {n}")));
    }
    if !(picard_tol > 0.0) {
        return Err(Error::validation("picard_tol", "must be positive"));
    }
    q.validate()?;
    let h = 1.0 / n as f64;
    let qm = mesh_potential(q, n);
    let base = half_primitive(q, n);
    // zeroth iterate: the boundary data alone
    let mut rows: Vec<Vec<Complex64>> = (0..=n).map(|i| vec![base[i]; n - i + 1]).collect();
    let mut update = f64::INFINITY;
    for it in 1..=MAX_PICARD_ITERATIONS {
        // inner integral along η for every ξ-row
        let inner: Vec<Vec<Complex64>> = rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut prev = qm[i] * row[0];
                let mut out = Vec::with_capacity(row.len());
                out.push(acc);
                for (j, &u) in row.iter().enumerate().skip(1) {
                    let g = qm[i + j] * u;
                    acc += 0.5 * h * (prev + g);
                    prev = g;
                    out.push(acc);
                }
                out
            })
            .collect();
        // outer integral along ξ for every η-column
        let columns: Vec<Vec<Complex64>> = (0..=n)
            .into_par_iter()
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut out = Vec::with_capacity(n - j + 1);
                out.push(acc);
                for i in 1..=n - j {
                    acc += 0.5 * h * (inner[i - 1][j] + inner[i][j]);
                    out.push(acc);
                }
                out
            })
            .collect();
        let next: Vec<Vec<Complex64>> = (0..=n)
            .map(|i| (0..=n - i).map(|j| base[i] + columns[j][i]).collect())
            .collect();
        update = next
            .iter()
            .flatten()
            .zip(rows.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        rows = next;
        if update < picard_tol {
            return Ok(KernelGrid {
                n,
                rows,
                q_ref: q.clone(),
                iterations: it,
                last_update: update,
            });
        }
        if !update.is_finite() {
            break;
        }
    }
    Err(Error::Convergence {
        iterations: MAX_PICARD_ITERATIONS,
        residual: update,
        message: "successive approximations for the kernel did not settle".into(),
    })
}

/// Largest mismatch between the fundamental system from the ODE engine and
/// its kernel representation, over all `μ` in `mu_grid` and `x` in `x_grid`
/// (which must be mesh nodes). `λ` is the principal root of `μ`; the
/// `t`-integrals use the trapezoid rule on the kernel mesh.
pub fn representation_residual(
    kernel: &KernelGrid,
    mu_grid: &[Complex64],
    x_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let idx = x_grid
        .iter()
        .map(|&x| {
            kernel.node_index(x).ok_or_else(|| {
                Error::validation(
                    "x_grid",
                    format!("x = {x} is not a node of the kernel mesh (n = {})", kernel.n),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let step = 2.0 / kernel.n as f64;
    let q = &kernel.q_ref;
    let pairs: Vec<(Complex64, usize)> = mu_grid
        .iter()
        .flat_map(|&mu| idx.iter().map(move |&m| (mu, m)))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|&(mu, m)| -> Result<f64> {
            let x = m as f64 / kernel.n as f64;
            let st = ode::fundamental_at(q, mu, x, cfg)?;
            let slice = kernel.slice(m);
            let cos_terms: Vec<Complex64> =
                slice.iter().map(|&(t, k)| k * free::cos_sqrt(mu, t)).collect();
            let sin_terms: Vec<Complex64> =
                slice.iter().map(|&(t, k)| k * free::sinc_sqrt(mu, t)).collect();
            let rc = st.c - free::cos_sqrt(mu, x) - trapezoid(&cos_terms, step);
            let rs = st.s - free::sinc_sqrt(mu, x) - trapezoid(&sin_terms, step);
            Ok(rc.norm().max(rs.norm()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_potential_has_zero_kernel() {
        let k = solve_goursat(&PotentialSpec::zero(), 32, 1e-12).unwrap();
        assert_eq!(k.sup_norm(), 0.0);
        assert_eq!(k.iterations(), 1);
    }

    #[test]
    fn boundary_values() {
        let q = PotentialSpec::cosine(1, 2.0);
        let k = solve_goursat(&q, 64, 1e-12).unwrap();
        for m in 0..=64 {
            let x = m as f64 / 64.0;
            assert_eq!(k.at(m, 0), c(0.0, 0.0), "K(x, -x) must vanish");
            // ½∫₀ˣ 2cos 2πt = sin(2πx)/(2π)
            let want = (std::f64::consts::TAU * x).sin() / std::f64::consts::TAU;
            assert!((k.at(m, m).re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_constant_diagonal() {
        let k = solve_goursat(&PotentialSpec::constant(c(1.0, 0.0)), 32, 1e-12).unwrap();
        for m in 0..=32 {
            assert!((k.at(m, m) - c(m as f64 / 64.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn off_mesh_points_are_rejected() {
        let k = solve_goursat(&PotentialSpec::zero(), 16, 1e-10).unwrap();
        let cfg = IntegratorConfig::default();
        let err = representation_residual(&k, &[c(1.0, 0.0)], &[0.3], &cfg).unwrap_err();
        assert!(err.is_validation());
        assert!(solve_goursat(&PotentialSpec::zero(), 8, 1e-10).unwrap_err().is_validation());
    }

    #[test]
    fn csv_dump_shape() {
        let k = solve_goursat(&PotentialSpec::constant(c(1.0, 0.0)), 16, 1e-12).unwrap();
        let csv = k.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "x,t,re_K,im_K");
        // (n + 1)(n + 2)/2 nodes
        assert_eq!(lines.len() - 1, 17 * 18 / 2);
    }
}
