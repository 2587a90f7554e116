//! Complex period-1 potentials.
//!
//! A [`PotentialSpec`] defines `q(x)` for every real `x` through its values on
//! one period. Kinds that only describe `[0, 1/2]` (`polynomial_piece`,
//! `b_family` on the half span) produce the second half according to
//! [`ExtensionMode`].
//!
//! Evaluation is piece-aware: a potential is a union of smooth pieces and
//! [`PotentialSpec::value_near`] evaluates the piece selected by an anchor
//! point, so that an integrator working on `[a, b]` between two breakpoints
//! sees one smooth function including at the endpoints.

mod conditions;
mod construct;
mod poly;
mod schema;

pub use conditions::{
    condition_report, decompose, decompose_half, decompose_unit, default_condition_tolerance,
    residual_condition_b, residual_condition_bb, residual_symmetry, ConditionReport,
    ConditionVerdicts, Decomposition, HalfDecomposition, Norm, UnitDecomposition,
};
pub use construct::{construct_from_q2, construct_from_q2_unit, Construction};
pub use poly::Polynomial;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub const DEFAULT_GRID_N: usize = 256;
pub const MIN_GRID_N: usize = 16;

/// Interval a piece or a condition lives on: `[0, 1/2]` or `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Span {
    #[default]
    Half,
    Unit,
}

impl Span {
    pub fn length(self) -> f64 {
        match self {
            Span::Half => 0.5,
            Span::Unit => 1.0,
        }
    }
}

/// How values on `[1/2, 1]` are produced for kinds specified on `[0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    /// `q(x) = q(x - 1/2)`.
    #[default]
    HalfPeriod,
    /// `q(x) = q(1 - x)`.
    ReflectAboutHalf,
    /// Caller-provided samples on `[1/2, 1]`.
    ExplicitTail,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    Zero,
    Constant(Complex64),
    /// `a0 + Σ_k cos[k-1]·cos(2πkx) + sin[k-1]·sin(2πkx)`.
    Fourier {
        a0: Complex64,
        cos: Vec<Complex64>,
        sin: Vec<Complex64>,
    },
    PolynomialPiece {
        poly: Polynomial,
        span: Span,
    },
    /// `grid_n + 1` samples on `[0, 1]`, linearly interpolated.
    Samples(Vec<Complex64>),
    /// `q = (∫_{b}^{x} q2)^2 + q2` with `b = 1/2` (half span) or `b = 1` (unit span).
    BFamily {
        q2: Polynomial,
        span: Span,
        base: Polynomial,
    },
}

impl PotentialKind {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::Zero => "zero",
            PotentialKind::Constant(_) => "constant",
            PotentialKind::Fourier { .. } => "fourier",
            PotentialKind::PolynomialPiece { .. } => "polynomial_piece",
            PotentialKind::Samples(_) => "samples",
            PotentialKind::BFamily { .. } => "b_family",
        }
    }

    fn is_sampled(&self) -> bool {
        matches!(self, PotentialKind::Samples(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    grid_n: usize,
    extension_mode: ExtensionMode,
    tail: Option<Vec<Complex64>>,
    offset: Complex64,
    id: Option<String>,
}

impl PotentialSpec {
    fn from_kind(kind: PotentialKind) -> Self {
        PotentialSpec {
            kind,
            grid_n: DEFAULT_GRID_N,
            extension_mode: ExtensionMode::default(),
            tail: None,
            offset: Complex64::new(0.0, 0.0),
            id: None,
        }
    }

    pub fn zero() -> Self {
        Self::from_kind(PotentialKind::Zero)
    }

    pub fn constant(value: Complex64) -> Self {
        Self::from_kind(PotentialKind::Constant(value))
    }

    pub fn fourier(a0: Complex64, cos: Vec<Complex64>, sin: Vec<Complex64>) -> Self {
        Self::from_kind(PotentialKind::Fourier { a0, cos, sin })
    }

    /// `amplitude · cos(2πkx)`.
    pub fn cosine(k: usize, amplitude: f64) -> Self {
        let mut cos = vec![Complex64::new(0.0, 0.0); k];
        cos[k - 1] = Complex64::new(amplitude, 0.0);
        Self::fourier(Complex64::new(0.0, 0.0), cos, Vec::new())
    }

    /// `amplitude · sin(2πkx)`.
    pub fn sine(k: usize, amplitude: f64) -> Self {
        let mut sin = vec![Complex64::new(0.0, 0.0); k];
        sin[k - 1] = Complex64::new(amplitude, 0.0);
        Self::fourier(Complex64::new(0.0, 0.0), Vec::new(), sin)
    }

    pub fn polynomial_piece(poly: Polynomial, span: Span) -> Self {
        Self::from_kind(PotentialKind::PolynomialPiece { poly, span })
    }

    /// Samples on `[0, 1]` inclusive; `grid_n` becomes `values.len() - 1`.
    pub fn samples(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len().saturating_sub(1);
        let spec = PotentialSpec {
            grid_n: n,
            ..Self::from_kind(PotentialKind::Samples(values))
        };
        spec.validate()?;
        Ok(spec)
    }

    pub(crate) fn b_family(q2: Polynomial, span: Span) -> Self {
        let base_point = span.length();
        let f = q2.integral_from(base_point);
        let base = f.mul(&f).add(&q2);
        Self::from_kind(PotentialKind::BFamily { q2, span, base })
    }

    pub fn with_grid_n(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }

    pub fn with_extension(mut self, mode: ExtensionMode) -> Self {
        self.extension_mode = mode;
        self
    }

    /// Samples on `[1/2, 1]` used by [`ExtensionMode::ExplicitTail`].
    pub fn with_tail(mut self, tail: Vec<Complex64>) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    /// `q + a`.
    pub fn shifted(&self, a: Complex64) -> Self {
        let mut out = self.clone();
        out.offset += a;
        out
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn extension_mode(&self) -> ExtensionMode {
        self.extension_mode
    }

    pub fn tail(&self) -> Option<&[Complex64]> {
        self.tail.as_deref()
    }

    /// Constant added on top of the kind's own values.
    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn is_sampled(&self) -> bool {
        self.kind.is_sampled()
    }

    fn uses_extension(&self) -> bool {
        matches!(
            self.kind,
            PotentialKind::PolynomialPiece {
                span: Span::Half,
                ..
            } | PotentialKind::BFamily {
                span: Span::Half,
                ..
            }
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < MIN_GRID_N {
            return Err(Error::validation(
                "grid_n",
                format!("must be at least {MIN_GRID_N}, got {}", self.grid_n),
            ));
        }
        if self.grid_n % 2 != 0 {
            return Err(Error::validation(
                "grid_n",
                format!("must be even so that x = 1/2 is a grid node, got {}", self.grid_n),
            ));
        }
        if let PotentialKind::Samples(v) = &self.kind {
            if v.len() != self.grid_n + 1 {
                return Err(Error::validation(
                    "params.re",
                    format!("expected grid_n + 1 = {} samples, got {}", self.grid_n + 1, v.len()),
                ));
            }
        }
        if self.uses_extension() && self.extension_mode == ExtensionMode::ExplicitTail {
            match &self.tail {
                None => {
                    return Err(Error::validation(
                        "params.tail_re",
                        "extension_mode explicit_tail requires tail samples on [1/2, 1]",
                    ))
                }
                Some(t) if t.len() < 2 => {
                    return Err(Error::validation(
                        "params.tail_re",
                        "tail needs at least two samples",
                    ))
                }
                _ => {}
            }
        }
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        let all_finite = match &self.kind {
            PotentialKind::Zero => true,
            PotentialKind::Constant(c) => finite(c),
            PotentialKind::Fourier { a0, cos, sin } => {
                finite(a0) && cos.iter().all(finite) && sin.iter().all(finite)
            }
            PotentialKind::PolynomialPiece { poly, .. } => poly.coeffs().iter().all(finite),
            PotentialKind::Samples(v) => v.iter().all(finite),
            PotentialKind::BFamily { base, .. } => base.coeffs().iter().all(finite),
        };
        if !all_finite || !finite(&self.offset) {
            return Err(Error::validation("params", "non-finite coefficient"));
        }
        Ok(())
    }

    /// `q(x)` with period-1 extension; right-continuous at breakpoints.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.value_near(x, x)
    }

    /// Left limit `q(x-)`.
    pub fn evaluate_left(&self, x: f64) -> Complex64 {
        self.value_near(x, x - 1e-12)
    }

    /// Evaluates at `x` the smooth piece that contains `anchor`, continued to
    /// `x` by the piece's own formula.
    pub fn value_near(&self, x: f64, anchor: f64) -> Complex64 {
        let period = anchor.floor();
        let u = anchor - period;
        let xl = x - period;
        let raw = match &self.kind {
            PotentialKind::Zero => Complex64::new(0.0, 0.0),
            PotentialKind::Constant(c) => *c,
            PotentialKind::Fourier { a0, cos, sin } => {
                let mut acc = *a0;
                for (k, c) in cos.iter().enumerate() {
                    acc += c * (TAU * (k + 1) as f64 * x).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    acc += s * (TAU * (k + 1) as f64 * x).sin();
                }
                acc
            }
            PotentialKind::PolynomialPiece { poly, span }
            | PotentialKind::BFamily {
                base: poly, span, ..
            } => self.piecewise(poly, *span, u, xl),
            PotentialKind::Samples(v) => linear_cell(v, 0.0, 1.0, u, xl),
        };
        raw + self.offset
    }

    fn piecewise(&self, poly: &Polynomial, span: Span, u: f64, xl: f64) -> Complex64 {
        if span == Span::Unit || u < 0.5 {
            return poly.eval(xl);
        }
        match self.extension_mode {
            ExtensionMode::HalfPeriod => poly.eval(xl - 0.5),
            ExtensionMode::ReflectAboutHalf => poly.eval(1.0 - xl),
            ExtensionMode::ExplicitTail => match &self.tail {
                Some(t) if t.len() >= 2 => linear_cell(t, 0.5, 1.0, u, xl),
                _ => Complex64::new(0.0, 0.0),
            },
        }
    }

    /// Points in `[0, 1)` where the potential (or one of its derivatives)
    /// may jump.
    fn base_breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::Zero | PotentialKind::Constant(_) | PotentialKind::Fourier { .. } => {
                Vec::new()
            }
            PotentialKind::PolynomialPiece { span, .. } | PotentialKind::BFamily { span, .. } => {
                match span {
                    Span::Unit => vec![0.0],
                    Span::Half => {
                        let mut b = vec![0.0, 0.5];
                        if self.extension_mode == ExtensionMode::ExplicitTail {
                            if let Some(t) = &self.tail {
                                let m = t.len().saturating_sub(1).max(1);
                                b.extend((1..m).map(|k| 0.5 + 0.5 * k as f64 / m as f64));
                            }
                        }
                        b
                    }
                }
            }
            PotentialKind::Samples(v) => {
                let n = v.len() - 1;
                (0..n).map(|k| k as f64 / n as f64).collect()
            }
        }
    }

    /// Breakpoints strictly inside `(x0, x1)`, sorted.
    pub fn breakpoints_in(&self, x0: f64, x1: f64) -> Vec<f64> {
        let base = self.base_breakpoints();
        if base.is_empty() || x1 <= x0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let first = x0.floor() as i64;
        let last = x1.ceil() as i64;
        for p in first..=last {
            for b in &base {
                let x = p as f64 + b;
                if x > x0 + 1e-13 && x < x1 - 1e-13 {
                    out.push(x);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Values at the grid nodes `j / grid_n`, `j = 0..=nodes`: one-sided
    /// limits from inside `[0, nodes h]` at the two ends, the mean of the
    /// one-sided limits at interior nodes (which only matters at jumps).
    pub(crate) fn node_values(&self, nodes: usize) -> Vec<Complex64> {
        let h = 1.0 / self.grid_n as f64;
        (0..=nodes)
            .map(|j| {
                let x = j as f64 * h;
                let right = self.value_near(x, x + 0.5 * h);
                let left = self.value_near(x, x - 0.5 * h);
                match j {
                    0 => right,
                    _ if j == nodes => left,
                    _ => 0.5 * (left + right),
                }
            })
            .collect()
    }

    /// Max of `|q|` over the grid of one period.
    pub fn sup_norm(&self) -> f64 {
        let mut m = self
            .node_values(self.grid_n)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        // both one-sided limits at interior breakpoints
        for b in self.breakpoints_in(0.0, 1.0) {
            m = m.max(self.evaluate_left(b).norm()).max(self.evaluate(b).norm());
        }
        m
    }

    /// Reads a potential spec from its JSON text.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        schema::from_value(&value)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        schema::from_value(value)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        schema::to_value(self)
    }
}

/// Linear interpolation on uniform samples over `[lo, hi]`, using the cell
/// that contains `anchor` and continuing that cell's line to `x`.
fn linear_cell(v: &[Complex64], lo: f64, hi: f64, anchor: f64, x: f64) -> Complex64 {
    let n = v.len() - 1;
    let scale = n as f64 / (hi - lo);
    let cell = (((anchor - lo) * scale).floor().max(0.0) as usize).min(n - 1);
    let t = (x - lo) * scale - cell as f64;
    v[cell] + (v[cell + 1] - v[cell]) * t
}
