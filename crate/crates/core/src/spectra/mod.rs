//! Eigenvalues of the periodic, anti-periodic and separated boundary problems.
//!
//! Every problem is the zero set of an entire characteristic function of `μ`
//! built from the fundamental system (see [`ProblemTag`]). Zeros are counted
//! with the argument principle on rectangles, isolated by quadtree
//! subdivision and polished by Newton's method:
//!
//! - boxes with one zero use Newton on the characteristic function itself;
//! - boxes with two zeros use a secant iteration on its `μ`-derivative, then
//!   decide between one double zero and a split pair by the size of the
//!   characteristic function at the critical point.
//!
//! Every accepted zero is re-counted on a small square around it, and its
//! algebraic order is taken from that count.

mod contour;
mod report;

pub use report::SpectrumReport;

use crate::error::{Error, Result};
use crate::ode::{self, IntegratorConfig, MuDerivatives, TransferState};
use crate::potential::{PotentialSpec, Span};
use contour::{winding, Rect, Winding};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Boundary-value problems on `[0, 1]` and `[0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemTag {
    D,
    N,
    DN,
    ND,
    P,
    AP,
    #[serde(rename = "D_half")]
    DHalf,
    #[serde(rename = "N_half")]
    NHalf,
    #[serde(rename = "DN_half")]
    DNHalf,
    #[serde(rename = "ND_half")]
    NDHalf,
}

impl ProblemTag {
    pub const ALL: [ProblemTag; 10] = [
        ProblemTag::D,
        ProblemTag::N,
        ProblemTag::DN,
        ProblemTag::ND,
        ProblemTag::P,
        ProblemTag::AP,
        ProblemTag::DHalf,
        ProblemTag::NHalf,
        ProblemTag::DNHalf,
        ProblemTag::NDHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemTag::D => "D",
            ProblemTag::N => "N",
            ProblemTag::DN => "DN",
            ProblemTag::ND => "ND",
            ProblemTag::P => "P",
            ProblemTag::AP => "AP",
            ProblemTag::DHalf => "D_half",
            ProblemTag::NHalf => "N_half",
            ProblemTag::DNHalf => "DN_half",
            ProblemTag::NDHalf => "ND_half",
        }
    }

    /// Right endpoint of the interval the problem lives on.
    pub fn endpoint(self) -> f64 {
        match self {
            ProblemTag::DHalf | ProblemTag::NHalf | ProblemTag::DNHalf | ProblemTag::NDHalf => 0.5,
            _ => 1.0,
        }
    }

    /// `+1` for P, `-1` for AP, `None` otherwise.
    pub fn floquet_sign(self) -> Option<f64> {
        match self {
            ProblemTag::P => Some(1.0),
            ProblemTag::AP => Some(-1.0),
            _ => None,
        }
    }

    fn pick(self, st: &TransferState) -> Complex64 {
        match self {
            ProblemTag::D | ProblemTag::DHalf => st.s,
            ProblemTag::N | ProblemTag::NHalf => st.cp,
            ProblemTag::DN | ProblemTag::DNHalf => st.sp,
            ProblemTag::ND | ProblemTag::NDHalf => st.c,
            ProblemTag::P => st.trace() - 2.0,
            ProblemTag::AP => st.trace() + 2.0,
        }
    }

    fn pick_deriv(self, d: &MuDerivatives) -> Complex64 {
        match self {
            ProblemTag::D | ProblemTag::DHalf => d.ds,
            ProblemTag::N | ProblemTag::NHalf => d.dcp,
            ProblemTag::DN | ProblemTag::DNHalf => d.dsp,
            ProblemTag::ND | ProblemTag::NDHalf => d.dc,
            ProblemTag::P | ProblemTag::AP => d.dc + d.dsp,
        }
    }
}

impl fmt::Display for ProblemTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::validation("tag", format!("unknown problem tag `{s}`")))
    }
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the `μ`-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub max_depth: usize,
}

pub const DEFAULT_MAX_DEPTH: usize = 40;

/// Number of bands covered by [`default_region`].
pub const DEFAULT_BANDS: usize = 4;

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        SearchRegion {
            re_min,
            re_max,
            im_min,
            im_max,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    /// The same region moved by `a`.
    pub fn translated(&self, a: Complex64) -> Self {
        SearchRegion {
            re_min: self.re_min + a.re,
            re_max: self.re_max + a.re,
            im_min: self.im_min + a.im,
            im_max: self.im_max + a.im,
            max_depth: self.max_depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("region", "bounds must be finite"));
        }
        if self.re_min >= self.re_max {
            return Err(Error::validation("region.re", "need re_min < re_max"));
        }
        if self.im_min >= self.im_max {
            return Err(Error::validation("region.im", "need im_min < im_max"));
        }
        Ok(())
    }

    fn rect(&self) -> Rect {
        Rect {
            re0: self.re_min,
            re1: self.re_max,
            im0: self.im_min,
            im1: self.im_max,
        }
    }

    fn from_rect(r: &Rect, max_depth: usize) -> Self {
        SearchRegion {
            re_min: r.re0,
            re_max: r.re1,
            im_min: r.im0,
            im_max: r.im1,
            max_depth,
        }
    }
}

/// Covers the first [`DEFAULT_BANDS`] bands: `re ∈ [-10, (2πN)² + 10]`,
/// `im ∈ ±(5 + 2‖q‖)`, with the real span widened by `‖q‖` on both sides.
pub fn default_region(q: &PotentialSpec) -> SearchRegion {
    let norm = q.sup_norm();
    let top = (std::f64::consts::TAU * DEFAULT_BANDS as f64).powi(2) + 10.0;
    SearchRegion::new(-10.0 - norm, top + norm, -(5.0 + 2.0 * norm), 5.0 + 2.0 * norm)
}

/// A located zero of a characteristic function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub mu: Complex64,
    pub tag: ProblemTag,
    pub algebraic_order: u32,
    /// P and AP only.
    pub geometric_multiplicity: Option<u8>,
    pub char_residual: f64,
    /// `‖M ∓ I‖∞`, P and AP only.
    pub monodromy_residual: Option<f64>,
    pub is_lowest: bool,
    /// One of two simple zeros closer than `1e-6 (1 + |μ|)`.
    pub near_double: bool,
}

/// Characteristic function of `tag` for the potential `q`.
struct CharFn<'a> {
    q: &'a PotentialSpec,
    tag: ProblemTag,
    cfg: &'a IntegratorConfig,
}

struct Sample {
    value: Complex64,
    deriv: Complex64,
    /// Size of the fundamental system entering the value, for noise estimates.
    scale: f64,
}

impl CharFn<'_> {
    fn state(&self, mu: Complex64, with_d: bool) -> Result<TransferState> {
        ode::transfer(self.q, mu, 0.0, self.tag.endpoint(), self.cfg, with_d)
    }

    fn value(&self, mu: Complex64) -> Result<Complex64> {
        Ok(self.tag.pick(&self.state(mu, false)?))
    }

    fn sample(&self, mu: Complex64) -> Result<Sample> {
        let st = self.state(mu, true)?;
        let d = st.deriv.expect("derivative block requested");
        Ok(Sample {
            value: self.tag.pick(&st),
            deriv: self.tag.pick_deriv(&d),
            scale: 1f64.max(st.c.norm()).max(st.sp.norm()),
        })
    }

    fn deriv(&self, mu: Complex64) -> Result<Complex64> {
        Ok(self.sample(mu)?.deriv)
    }

    /// Level below which the computed value is indistinguishable from zero.
    fn noise(&self, mu: Complex64, scale: f64) -> f64 {
        100.0 * self.cfg.rel_tol * (1.0 + mu.norm()).sqrt() * scale
    }

    fn winding(&self, rect: &Rect) -> Result<Winding> {
        winding(&|z| self.value(z), rect, SAMPLES_PER_SIDE)
    }
}

const SAMPLES_PER_SIDE: usize = 64;
const SPLIT_FRACTIONS: [f64; 4] = [0.4637, 0.5389, 0.4127, 0.5813];
const MAX_DILATIONS: usize = 5;
const NEWTON_ITERS: usize = 60;

/// Boxes below this diameter with at most two zeros are handed to the
/// local solvers.
fn coarse_diameter(center: Complex64) -> f64 {
    center.norm().sqrt().max(4.0)
}

fn tight_radius(mu: Complex64) -> f64 {
    1e-2 * (1.0 + mu.norm()).sqrt()
}

/// The tag's characteristic function at `μ`.
pub fn char_value(
    q: &PotentialSpec,
    tag: ProblemTag,
    mu: Complex64,
    cfg: &IntegratorConfig,
) -> Result<Complex64> {
    CharFn { q, tag, cfg }.value(mu)
}

/// Characteristic function and its `μ`-derivative.
pub fn char_value_with_derivative(
    q: &PotentialSpec,
    tag: ProblemTag,
    mu: Complex64,
    cfg: &IntegratorConfig,
) -> Result<(Complex64, Complex64)> {
    let s = CharFn { q, tag, cfg }.sample(mu)?;
    Ok((s.value, s.deriv))
}

fn counted_region(f: &CharFn, region: &SearchRegion) -> Result<(Rect, i64)> {
    let mut rect = region.rect();
    for _ in 0..=MAX_DILATIONS {
        if let Winding::Count(n) = f.winding(&rect)? {
            return Ok((rect, n));
        }
        rect = rect.dilate(1e-6 * rect.diag());
    }
    Err(Error::Convergence {
        iterations: MAX_DILATIONS,
        residual: 0.0,
        message: format!(
            "characteristic function of {} vanishes on the contour; move the region",
            f.tag
        ),
    })
}

/// Number of zeros (with multiplicity) of the tag's characteristic function
/// inside `region`. A zero on the contour triggers a small dilation of the
/// region, at most five times.
pub fn count_zeros(
    q: &PotentialSpec,
    tag: ProblemTag,
    region: &SearchRegion,
    cfg: &IntegratorConfig,
) -> Result<i64> {
    region.validate()?;
    cfg.validate()?;
    Ok(counted_region(&CharFn { q, tag, cfg }, region)?.1)
}

struct Root {
    mu: Complex64,
    order: u32,
    near_double: bool,
}

struct Finder<'a> {
    f: CharFn<'a>,
    max_depth: usize,
    roots: Vec<Root>,
    unresolved: Vec<Rect>,
}

impl Finder<'_> {
    /// Returns `false` when no split of `rect` reproduces `w`, which means
    /// the count itself came from a contour passing too close to a zero.
    fn process(&mut self, rect: Rect, w: i64, depth: usize) -> Result<bool> {
        if w == 0 {
            return Ok(true);
        }
        if w < 0 {
            self.unresolved.push(rect);
            return Ok(true);
        }
        if w <= 2 && rect.diag() < coarse_diameter(rect.center()) {
            let found = if w == 1 { self.simple(&rect)? } else { self.pair(&rect)? };
            if let Some(roots) = found {
                self.roots.extend(roots);
                return Ok(true);
            }
        }
        if depth >= self.max_depth {
            self.unresolved.push(rect);
            return Ok(true);
        }
        let mut mismatch = true;
        for t in SPLIT_FRACTIONS {
            let kids = rect.split(t);
            let counts = kids
                .iter()
                .map(|k| self.f.winding(k))
                .collect::<Result<Vec<_>>>()?;
            let mut sum = 0;
            let mut ok = true;
            for c in &counts {
                match c {
                    Winding::Count(n) => sum += n,
                    Winding::NearZero => ok = false,
                }
            }
            if !ok {
                mismatch = false;
                continue;
            }
            if sum != w {
                continue;
            }
            let marks = (self.roots.len(), self.unresolved.len());
            let mut consistent = true;
            for (k, c) in kids.into_iter().zip(counts) {
                if let Winding::Count(n) = c {
                    if !self.process(k, n, depth + 1)? {
                        consistent = false;
                        break;
                    }
                }
            }
            if consistent {
                return Ok(true);
            }
            self.roots.truncate(marks.0);
            self.unresolved.truncate(marks.1);
        }
        if mismatch && depth > 0 {
            return Ok(false);
        }
        self.unresolved.push(rect);
        Ok(true)
    }

    /// Newton on the characteristic function, confined to a neighbourhood
    /// of `rect`.
    fn newton(&self, z0: Complex64, rect: &Rect) -> Result<Option<Complex64>> {
        let fence = rect.dilate(0.5 * rect.diag());
        let mut z = z0;
        let mut last = f64::INFINITY;
        for it in 0..NEWTON_ITERS {
            let s = self.f.sample(z)?;
            if s.deriv.norm() == 0.0 {
                return Ok(None);
            }
            let step = s.value / s.deriv;
            let size = step.norm();
            if it > 6 && size >= last {
                // stalled at the noise floor
                return Ok((last < 1e-9 * (1.0 + z.norm())).then_some(z));
            }
            z -= step;
            if !z.is_finite() || !fence.contains(z, 0.0) {
                return Ok(None);
            }
            if size <= 1e-14 * (1.0 + z.norm()) {
                return Ok(Some(z));
            }
            last = size;
        }
        Ok((last < 1e-9 * (1.0 + z.norm())).then_some(z))
    }

    /// Secant iteration for a zero of the derivative.
    fn critical_point(&self, rect: &Rect) -> Result<Option<Complex64>> {
        let fence = rect.dilate(0.5 * rect.diag());
        let mut z0 = rect.center();
        let mut z1 = z0 + Complex64::new(1e-3, 3e-4) * rect.diag();
        let mut g0 = self.f.deriv(z0)?;
        let mut g1 = self.f.deriv(z1)?;
        let mut last = f64::INFINITY;
        for it in 0..NEWTON_ITERS {
            let slope = (g1 - g0) / (z1 - z0);
            if slope.norm() == 0.0 || !slope.is_finite() {
                break;
            }
            let step = g1 / slope;
            let size = step.norm();
            if it > 6 && size >= last {
                return Ok((last < 1e-9 * (1.0 + z1.norm())).then_some(z1));
            }
            let z2 = z1 - step;
            if !z2.is_finite() || !fence.contains(z2, 0.0) {
                return Ok(None);
            }
            if size <= 1e-14 * (1.0 + z2.norm()) {
                return Ok(Some(z2));
            }
            (z0, g0) = (z1, g1);
            z1 = z2;
            g1 = self.f.deriv(z1)?;
            last = size;
        }
        Ok((last < 1e-9 * (1.0 + z1.norm())).then_some(z1))
    }

    /// Tight-contour count around `z`, trying successively smaller squares.
    fn tight_count(&self, z: Complex64, radius: f64, want: i64) -> Result<bool> {
        for shrink in [1.0, 0.1, 0.01] {
            if let Winding::Count(n) = self.f.winding(&Rect::square(z, radius * shrink))? {
                if n == want {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn simple(&self, rect: &Rect) -> Result<Option<Vec<Root>>> {
        let Some(z) = self.newton(rect.center(), rect)? else {
            return Ok(None);
        };
        if !rect.contains(z, 1e-9 * rect.diag()) {
            return Ok(None);
        }
        let rho = tight_radius(z).min(rect.diag());
        if !self.tight_count(z, rho, 1)? {
            return Ok(None);
        }
        Ok(Some(vec![Root {
            mu: z,
            order: 1,
            near_double: false,
        }]))
    }

    fn pair(&self, rect: &Rect) -> Result<Option<Vec<Root>>> {
        let Some(z) = self.critical_point(rect)? else {
            return Ok(None);
        };
        if !rect.contains(z, 1e-9 * rect.diag()) {
            return Ok(None);
        }
        let rho = tight_radius(z).min(rect.diag());
        let s = self.f.sample(z)?;
        if s.value.norm() <= self.f.noise(z, s.scale) {
            if self.tight_count(z, rho, 2)? {
                return Ok(Some(vec![Root {
                    mu: z,
                    order: 2,
                    near_double: false,
                }]));
            }
            return Ok(None);
        }
        // two simple zeros at about z ± sqrt(-2 f / f'')
        let h = 1e-3 * (1.0 + z.norm()).sqrt();
        let f2 = (self.f.deriv(z + h)? - self.f.deriv(z - h)?) / (2.0 * h);
        if f2.norm() == 0.0 {
            return Ok(None);
        }
        let delta = (-2.0 * s.value / f2).sqrt();
        let (Some(r1), Some(r2)) = (self.newton(z + delta, rect)?, self.newton(z - delta, rect)?)
        else {
            return Ok(None);
        };
        let margin = 1e-9 * rect.diag();
        let gap = (r1 - r2).norm();
        if !rect.contains(r1, margin) || !rect.contains(r2, margin) || gap <= 1e-12 * (1.0 + z.norm()) {
            return Ok(None);
        }
        let each = rho.min(gap / 3.0);
        let separate = self.tight_count(r1, each, 1)? && self.tight_count(r2, each, 1)?;
        if !separate && !self.tight_count(0.5 * (r1 + r2), rho.max(gap), 2)? {
            return Ok(None);
        }
        let near = gap < 1e-6 * (1.0 + (0.5 * (r1 + r2)).norm());
        Ok(Some(
            [r1, r2]
                .into_iter()
                .map(|mu| Root {
                    mu,
                    order: 1,
                    near_double: near,
                })
                .collect(),
        ))
    }
}

/// `(multiplicity, ‖M ∓ I‖∞)` at a P or AP eigenvalue; the multiplicity is 2
/// when the monodromy matrix equals `±I` to `1e-7 (1 + ‖M‖∞)`.
pub fn geometric_multiplicity(
    q: &PotentialSpec,
    mu: Complex64,
    tag: ProblemTag,
    cfg: &IntegratorConfig,
) -> Result<(u8, f64)> {
    let Some(sign) = tag.floquet_sign() else {
        return Err(Error::validation("tag", format!("{tag} has no monodromy multiplicity")));
    };
    let m = ode::monodromy(q, mu, cfg, false)?.matrix();
    let norm_inf = |rows: [[Complex64; 2]; 2]| {
        rows.iter()
            .map(|r| r[0].norm() + r[1].norm())
            .fold(0.0, f64::max)
    };
    let mut r = m;
    r[0][0] -= sign;
    r[1][1] -= sign;
    let residual = norm_inf(r);
    let tol = 1e-7 * (1.0 + norm_inf(m));
    Ok((if residual < tol { 2 } else { 1 }, residual))
}

fn order_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Locates all zeros of the tag's characteristic function in `region`.
///
/// Boxes that cannot be resolved within `region.max_depth` subdivisions are
/// listed in the report rather than treated as errors.
pub fn find_eigenvalues(
    q: &PotentialSpec,
    tag: ProblemTag,
    region: &SearchRegion,
    cfg: &IntegratorConfig,
) -> Result<SpectrumReport> {
    region.validate()?;
    cfg.validate()?;
    q.validate()?;
    let f = CharFn { q, tag, cfg };
    let (rect, total) = counted_region(&f, region)?;
    let mut finder = Finder {
        f,
        max_depth: region.max_depth,
        roots: Vec::new(),
        unresolved: Vec::new(),
    };
    finder.process(rect, total, 0)?;

    let mut roots = std::mem::take(&mut finder.roots);
    roots.sort_by(|a, b| order_key(&a.mu, &b.mu));
    roots.dedup_by(|b, a| (a.mu - b.mu).norm() <= 1e-9 * (1.0 + a.mu.norm()));

    let mut eigenvalues = Vec::with_capacity(roots.len());
    for r in roots {
        let residual = f_residual(&finder.f, r.mu)?;
        let (gm, mres) = match tag.floquet_sign() {
            Some(_) => {
                let (g, m) = geometric_multiplicity(q, r.mu, tag, cfg)?;
                (Some(g), Some(m))
            }
            None => (None, None),
        };
        eigenvalues.push(Eigenvalue {
            mu: r.mu,
            tag,
            algebraic_order: r.order,
            geometric_multiplicity: gm,
            char_residual: residual,
            monodromy_residual: mres,
            is_lowest: false,
            near_double: r.near_double,
        });
    }
    if tag == ProblemTag::P {
        // sorted by real part, then imaginary part
        if let Some(first) = eigenvalues.first_mut() {
            first.is_lowest = true;
        }
    }
    let refined_total = eigenvalues.iter().map(|e| e.algebraic_order as i64).sum();
    Ok(SpectrumReport {
        tag,
        region: SearchRegion::from_rect(&rect, region.max_depth),
        eigenvalues,
        winding_total: total,
        refined_total,
        unresolved: finder
            .unresolved
            .iter()
            .map(|r| SearchRegion::from_rect(r, region.max_depth))
            .collect(),
    })
}

fn f_residual(f: &CharFn, mu: Complex64) -> Result<f64> {
    Ok(f.value(mu)?.norm())
}

/// Shifts `q` so that the Neumann problem on `[0, span]` has the eigenvalue
/// 0: returns `(q - μ*, μ*)` for the Neumann eigenvalue `μ*` of smallest real
/// part (ties broken by smallest `|Im μ|`) in the default region.
pub fn normalize_neumann(
    q: &PotentialSpec,
    span: Span,
    cfg: &IntegratorConfig,
) -> Result<(PotentialSpec, Complex64)> {
    let tag = match span {
        Span::Half => ProblemTag::NHalf,
        Span::Unit => ProblemTag::N,
    };
    let region = default_region(q);
    let report = find_eigenvalues(q, tag, &region, cfg)?;
    let lowest = report
        .eigenvalues
        .iter()
        .map(|e| e.mu)
        .min_by(|a, b| {
            let tie = 1e-9 * (1.0 + a.norm().max(b.norm()));
            if (a.re - b.re).abs() <= tie {
                a.im.abs().total_cmp(&b.im.abs())
            } else {
                a.re.total_cmp(&b.re)
            }
        })
        .ok_or_else(|| {
            Error::NotFound(format!(
                "no {tag} eigenvalue in [{}, {}] x [{}, {}]; enlarge the search region",
                region.re_min, region.re_max, region.im_min, region.im_max
            ))
        })?;
    Ok((q.shifted(-lowest), lowest))
}

/// [`normalize_neumann`] on `[0, 1/2]`.
pub fn normalize_half_neumann(
    q: &PotentialSpec,
    cfg: &IntegratorConfig,
) -> Result<(PotentialSpec, Complex64)> {
    normalize_neumann(q, Span::Half, cfg)
}
