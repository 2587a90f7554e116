//! Dormand-Prince 5(4) with PI step-size control for fixed-size complex
//! systems.

use crate::error::{Error, Result};
use num_complex::Complex64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// error coefficients: 5th-order weights minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const BETA: f64 = 0.04;
const MAX_STEPS: usize = 2_000_000;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

type State<const N: usize> = [Complex64; N];

#[inline]
fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        *o += acc * h;
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (`x1 > x0`), returning `y(x1)`.
pub(crate) fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: State<N>,
    tol: Tolerances,
) -> Result<State<N>>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    let span = x1 - x0;
    if span <= 0.0 {
        return Ok(y0);
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = (0.25 * tol.max_step).min(span);
    let mut k1 = f(x, &y);
    let mut err_old: f64 = 1e-4;
    let mut rejected = false;
    let expo = 0.2 - 0.75 * BETA;

    for _ in 0..MAX_STEPS {
        let last = x + h >= x1 - 1e-14 * x1.abs().max(1.0);
        if last {
            h = x1 - x;
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            x + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let x_new = if last { x1 } else { x + h };
        let k6 = f(
            x_new,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(x_new, &y_new);

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            let fac = (err.max(1e-10).powf(expo) / err_old.powf(BETA)) / SAFETY;
            let mut fac = (1.0 / fac).clamp(FAC_MIN, FAC_MAX);
            if rejected {
                fac = fac.min(1.0);
            }
            err_old = err.max(1e-4);
            x = x_new;
            y = y_new;
            k1 = k7;
            if last {
                return Ok(y);
            }
            h = (h * fac).min(tol.max_step);
            rejected = false;
        } else {
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-expo)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac;
            rejected = true;
        }
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(Error::Integration {
                x,
                message: format!("step size underflow (h = {h:e})"),
            });
        }
    }
    Err(Error::Integration {
        x,
        message: format!("exceeded {MAX_STEPS} steps"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let tol = Tolerances {
            rel: 1e-10,
            abs: 1e-12,
            max_step: 0.1,
        };
        let y = integrate(
            |_, y: &[Complex64; 1]| [-y[0]],
            0.0,
            2.0,
            [Complex64::new(1.0, 0.0)],
            tol,
        )
        .unwrap();
        assert!((y[0].re - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn rotation_is_complex_exponential() {
        let tol = Tolerances {
            rel: 1e-11,
            abs: 1e-13,
            max_step: 0.05,
        };
        let i = Complex64::new(0.0, 1.0);
        let y = integrate(|_, y: &[Complex64; 1]| [i * y[0]], 0.0, 3.0, [Complex64::new(1.0, 0.0)], tol)
            .unwrap();
        assert!((y[0] - (i * 3.0).exp()).norm() < 1e-10);
    }

    #[test]
    fn blow_up_is_an_error() {
        let tol = Tolerances {
            rel: 1e-8,
            abs: 1e-10,
            max_step: 0.1,
        };
        let r = integrate(
            |_, y: &[Complex64; 1]| [y[0] * y[0]],
            0.0,
            1.0,
            [Complex64::new(2.0, 0.0)],
            tol,
        );
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
