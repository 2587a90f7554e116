use num_complex::Complex64;
use std::fmt;

/// Complex polynomial stored with coefficients in descending powers of `x`,
/// the same order used on the command line (`poly:16,-4` is `16x - 4`).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(descending: Vec<Complex64>) -> Self {
        let mut p = Polynomial { coeffs: descending };
        p.trim();
        p
    }

    pub fn from_real(descending: &[f64]) -> Self {
        Self::new(descending.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// Coefficients, highest power first. Empty for the zero polynomial.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(&mut self) {
        let lead = self
            .coeffs
            .iter()
            .position(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(self.coeffs.len());
        self.coeffs.drain(..lead);
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    fn ascending(&self) -> Vec<Complex64> {
        self.coeffs.iter().rev().copied().collect()
    }

    fn from_ascending(mut asc: Vec<Complex64>) -> Self {
        asc.reverse();
        Self::new(asc)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let (a, b) = (self.ascending(), other.ascending());
        let n = a.len().max(b.len());
        let zero = Complex64::new(0.0, 0.0);
        let sum = (0..n)
            .map(|k| a.get(k).copied().unwrap_or(zero) + b.get(k).copied().unwrap_or(zero))
            .collect();
        Self::from_ascending(sum)
    }

    pub fn scale(&self, factor: Complex64) -> Polynomial {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let (a, b) = (self.ascending(), other.ascending());
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        Self::from_ascending(out)
    }

    /// `x -> p(a - x)`.
    pub fn reflect(&self, a: f64) -> Polynomial {
        // Horner in polynomial arithmetic with the linear factor (a - x).
        let lin = Polynomial::from_real(&[-1.0, a]);
        self.coeffs.iter().fold(Polynomial::zero(), |acc, c| {
            acc.mul(&lin).add(&Polynomial::new(vec![*c]))
        })
    }

    /// The antiderivative vanishing at `base`.
    pub fn integral_from(&self, base: f64) -> Polynomial {
        let mut asc = vec![Complex64::new(0.0, 0.0)];
        asc.extend(
            self.ascending()
                .into_iter()
                .enumerate()
                .map(|(k, c)| c / (k as f64 + 1.0)),
        );
        let prim = Self::from_ascending(asc);
        let offset = prim.eval(base);
        prim.add(&Polynomial::new(vec![-offset]))
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| {
                if c.im == 0.0 {
                    format!("{}", c.re)
                } else {
                    format!("{}{:+}i", c.re, c.im)
                }
            })
            .collect();
        write!(f, "poly:{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_and_integral() {
        // 16x - 4 = 16(x - 1/4) is odd about 1/4
        let p = Polynomial::from_real(&[16.0, -4.0]);
        let r = p.reflect(0.5);
        assert!(p.add(&r).is_zero());
        // ∫_{1/2}^x 16(t - 1/4) dt = 8(x - 1/4)^2 - 1/2
        let f = p.integral_from(0.5);
        for &x in &[0.0, 0.1, 0.25, 0.4, 0.5] {
            let want = 8.0 * (x - 0.25) * (x - 0.25) - 0.5;
            assert!((f.eval(x).re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_handling() {
        let z = Polynomial::from_real(&[0.0, 0.0]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(z.eval(3.0), Complex64::new(0.0, 0.0));
        assert!(z.mul(&Polynomial::from_real(&[1.0])).is_zero());
    }
}
