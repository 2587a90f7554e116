//! Winding numbers of an analytic function along rectangle boundaries.

use crate::error::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Axis-aligned rectangle in the `μ`-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn square(center: Complex64, half: f64) -> Rect {
        Rect {
            re0: center.re - half,
            re1: center.re + half,
            im0: center.im - half,
            im1: center.im + half,
        }
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn diag(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re0 - margin
            && z.re <= self.re1 + margin
            && z.im >= self.im0 - margin
            && z.im <= self.im1 + margin
    }

    pub fn dilate(&self, by: f64) -> Rect {
        Rect {
            re0: self.re0 - by,
            re1: self.re1 + by,
            im0: self.im0 - by,
            im1: self.im1 + by,
        }
    }

    /// Splits at fraction `t` of each side that is being cut. Boxes that are
    /// roughly square are quartered, elongated ones are halved across their
    /// long side.
    pub fn split(&self, t: f64) -> Vec<Rect> {
        let (w, h) = (self.width(), self.height());
        let xm = self.re0 + t * w;
        let ym = self.im0 + t * h;
        if w > 2.0 * h {
            vec![Rect { re1: xm, ..*self }, Rect { re0: xm, ..*self }]
        } else if h > 2.0 * w {
            vec![Rect { im1: ym, ..*self }, Rect { im0: ym, ..*self }]
        } else {
            vec![
                Rect { re1: xm, im1: ym, ..*self },
                Rect { re0: xm, im1: ym, ..*self },
                Rect { re1: xm, im0: ym, ..*self },
                Rect { re0: xm, im0: ym, ..*self },
            ]
        }
    }

    /// Counter-clockwise boundary samples, `per_side` per edge, starting at
    /// the lower-left corner.
    fn boundary(&self, per_side: usize) -> Vec<Complex64> {
        let corners = [
            Complex64::new(self.re0, self.im0),
            Complex64::new(self.re1, self.im0),
            Complex64::new(self.re1, self.im1),
            Complex64::new(self.re0, self.im1),
        ];
        let mut pts = Vec::with_capacity(4 * per_side);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for j in 0..per_side {
                pts.push(a + (b - a) * (j as f64 / per_side as f64));
            }
        }
        pts
    }
}

/// Outcome of a winding computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Winding {
    Count(i64),
    /// The function (nearly) vanishes on the contour; the count is unreliable.
    NearZero,
}

const MAX_REFINE: usize = 40;

/// Winding number of `f` along the boundary of `rect`. Adjacent samples whose
/// phase differs by `π/2` or more are refined by bisection.
pub(crate) fn winding<F>(f: &F, rect: &Rect, per_side: usize) -> Result<Winding>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let pts = rect.boundary(per_side);
    let vals: Vec<Complex64> = pts.par_iter().map(|&z| f(z)).collect::<Result<_>>()?;
    let min_seg = 1e-13 * rect.diag();
    let mut total = 0.0;
    for k in 0..pts.len() {
        let l = (k + 1) % pts.len();
        match refine(f, pts[k], vals[k], pts[l], vals[l], min_seg, 0)? {
            Some(d) => total += d,
            None => return Ok(Winding::NearZero),
        }
    }
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() >= 0.25 {
        return Ok(Winding::NearZero);
    }
    Ok(Winding::Count(n as i64))
}

fn refine<F>(
    f: &F,
    za: Complex64,
    fa: Complex64,
    zb: Complex64,
    fb: Complex64,
    min_seg: f64,
    depth: usize,
) -> Result<Option<f64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(fa.is_finite() && fb.is_finite()) || fa.norm() == 0.0 || fb.norm() == 0.0 {
        return Ok(None);
    }
    let d = (fb / fa).arg();
    if d.abs() < FRAC_PI_2 {
        return Ok(Some(d));
    }
    if depth >= MAX_REFINE || (zb - za).norm() < min_seg {
        return Ok(None);
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm)?;
    let Some(left) = refine(f, za, fa, zm, fm, min_seg, depth + 1)? else {
        return Ok(None);
    };
    let Some(right) = refine(f, zm, fm, zb, fb, min_seg, depth + 1)? else {
        return Ok(None);
    };
    Ok(Some(left + right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(z: Complex64) -> Result<Complex64> {
        // zeros at 1, 2 (double), -3i
        let one = Complex64::new(1.0, 0.0);
        Ok((z - one) * (z - 2.0 * one).powi(2) * (z + Complex64::new(0.0, 3.0)))
    }

    #[test]
    fn counts_polynomial_zeros() {
        let r = Rect { re0: 0.5, re1: 2.5, im0: -1.0, im1: 1.0 };
        assert_eq!(winding(&poly, &r, 64).unwrap(), Winding::Count(3));
        let r = Rect { re0: -1.0, re1: 3.0, im0: -4.0, im1: 1.0 };
        assert_eq!(winding(&poly, &r, 64).unwrap(), Winding::Count(4));
        let r = Rect { re0: 3.0, re1: 4.0, im0: -1.0, im1: 1.0 };
        assert_eq!(winding(&poly, &r, 64).unwrap(), Winding::Count(0));
    }

    #[test]
    fn zero_on_boundary_is_flagged() {
        let r = Rect { re0: 1.0, re1: 1.7, im0: -1.0, im1: 1.0 };
        assert_eq!(winding(&poly, &r, 64).unwrap(), Winding::NearZero);
    }

    #[test]
    fn coarse_sampling_is_refined() {
        // phase advances ~1.8 rad between the initial samples
        let f = |z: Complex64| Ok((z * 60.0).sin());
        let r = Rect { re0: -0.9, re1: 1.01, im0: -0.5, im1: 0.5 };
        // zeros at kπ/60 for -17 <= k <= 19
        assert_eq!(winding(&f, &r, 64).unwrap(), Winding::Count(37));
    }

    #[test]
    fn split_partitions() {
        let r = Rect { re0: 0.0, re1: 10.0, im0: -1.0, im1: 1.0 };
        assert_eq!(r.split(0.4637).len(), 2);
        let sq = Rect::square(Complex64::new(0.0, 0.0), 1.0);
        let kids = sq.split(0.4637);
        assert_eq!(kids.len(), 4);
        let area: f64 = kids.iter().map(|k| k.width() * k.height()).sum();
        assert!((area - 4.0).abs() < 1e-12);
    }
}
