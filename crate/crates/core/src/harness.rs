//! End-to-end verification: potential conditions, spectral identities,
//! spectrum matchings and double-eigenvalue classification, gathered into a
//! [`VerificationReport`] with one verdict per characterization.
//!
//! A verdict compares a hypothesis on the potential with a spectral
//! conclusion. Both sides are measured; the verdict is `consistent` when
//! they agree, `violated` when they do not, and `inconclusive` when a
//! spectrum was not fully resolved or contains an ambiguous near-double pair.
//! Verdicts are a pure function of the stored residuals and tolerances, see
//! [`recompute_verdicts`].

use crate::error::Result;
use crate::ode::{self, IntegratorConfig};
use crate::output::{Header, ToleranceLadder};
use crate::potential::{condition_report, ConditionReport, Norm, PotentialSpec, Span};
use crate::spectra::{self, ProblemTag, SearchRegion, SpectrumReport};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write;

/// `|μ|` below which an eigenvalue counts as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-6;

/// Eight real points evenly spaced on `[0, 100]` and eight on `|μ| = 20`
/// at angles `2πk/8 + π/8`.
pub fn default_mu_grid() -> Vec<Complex64> {
    let real = (0..8).map(|k| Complex64::new(100.0 * k as f64 / 7.0, 0.0));
    let circle = (0..8).map(|k| Complex64::from_polar(20.0, TAU * k as f64 / 8.0 + PI / 8.0));
    real.chain(circle).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub integrator: IntegratorConfig,
    pub tolerances: ToleranceLadder,
    pub norm: Norm,
    pub mu_grid: Vec<Complex64>,
    /// Region for all spectra; the default region of the potential if absent.
    pub region: Option<SearchRegion>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            integrator: IntegratorConfig::default(),
            tolerances: ToleranceLadder::default(),
            norm: Norm::L2,
            mu_grid: default_mu_grid(),
            region: None,
        }
    }
}

/// Residuals of an identity at `x = 1/2` and at `x = 3/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityPair {
    pub at_half: f64,
    pub at_three_half: f64,
}

impl IdentityPair {
    pub fn max(&self) -> f64 {
        self.at_half.max(self.at_three_half)
    }
}

fn identity_over_grid(
    q: &PotentialSpec,
    mu_grid: &[Complex64],
    cfg: &IntegratorConfig,
    g: impl Fn(Complex64, &ode::TransferState) -> Complex64,
) -> Result<IdentityPair> {
    let mut out = IdentityPair {
        at_half: 0.0,
        at_three_half: 0.0,
    };
    for &mu in mu_grid {
        let path = ode::transfer_path(q, mu, 0.0, &[0.5, 1.5], cfg, false)?;
        out.at_half = out.at_half.max(g(mu, &path[0]).norm());
        out.at_three_half = out.at_three_half.max(g(mu, &path[1]).norm());
    }
    Ok(out)
}

/// `max |c'(x, μ) + μ s(x, μ)|` over the grid at `x = 1/2` and `x = 3/2`.
pub fn identity_residual_b(
    q: &PotentialSpec,
    mu_grid: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<IdentityPair> {
    identity_over_grid(q, mu_grid, cfg, |mu, st| st.cp + mu * st.s)
}

/// `max |c(x, μ) - s'(x, μ)|` over the grid at `x = 1/2` and `x = 3/2`.
pub fn identity_residual_sym(
    q: &PotentialSpec,
    mu_grid: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<IdentityPair> {
    identity_over_grid(q, mu_grid, cfg, |_, st| st.c - st.sp)
}

/// One Neumann eigenvalue `μₙ` (zero of `c'(1, ·)`) in the monodromy checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationRow {
    pub mu: Complex64,
    /// `|s(1, μₙ)|`; the checks need it to vanish.
    pub s_at_one: f64,
    pub premise_met: bool,
    /// `max |c(x+1) - c(1) c(x)|, |s(x+1) - s'(1) s(x)|` over `x ∈ [0, 1]`.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub mu: Complex64,
    /// `|s'(1) c(1) - 1|`
    pub product_residual: f64,
    /// `|s'(1) - c(1)|`
    pub equality_residual: f64,
}

const FACTORIZATION_POINTS: usize = 8;

fn factorization_rows(
    q: &PotentialSpec,
    neumann: &SpectrumReport,
    premise_tol: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<FactorizationRow>, Vec<ProductRow>)> {
    let xs: Vec<f64> = (0..=FACTORIZATION_POINTS)
        .map(|k| k as f64 / FACTORIZATION_POINTS as f64)
        .collect();
    let mut path_x = xs.clone();
    path_x.extend(xs.iter().skip(1).map(|x| x + 1.0));
    let mut rows = Vec::new();
    let mut products = Vec::new();
    for e in &neumann.eigenvalues {
        let path = ode::transfer_path(q, e.mu, 0.0, &path_x, cfg, false)?;
        let one = &path[FACTORIZATION_POINTS];
        let s1 = one.s.norm();
        let premise_met = s1 < premise_tol;
        let residual = premise_met.then(|| {
            (0..=FACTORIZATION_POINTS)
                .map(|k| {
                    let (a, b) = (&path[k], &path[FACTORIZATION_POINTS + k]);
                    let rc = (b.c - one.c * a.c).norm();
                    let rs = (b.s - one.sp * a.s).norm();
                    rc.max(rs)
                })
                .fold(0.0, f64::max)
        });
        if premise_met {
            products.push(ProductRow {
                mu: e.mu,
                product_residual: (one.sp * one.c - 1.0).norm(),
                equality_residual: (one.sp - one.c).norm(),
            });
        }
        rows.push(FactorizationRow {
            mu: e.mu,
            s_at_one: s1,
            premise_met,
            residual,
        });
    }
    Ok((rows, products))
}

/// For every zero `μₙ` of `c'(1, ·)` in `region`: whether `s(1, μₙ)` also
/// vanishes, and if so how well the monodromy factorizes at `μₙ`.
pub fn monodromy_factorization_check(
    q: &PotentialSpec,
    region: &SearchRegion,
    premise_tol: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<FactorizationRow>> {
    let n = spectra::find_eigenvalues(q, ProblemTag::N, region, cfg)?;
    Ok(factorization_rows(q, &n, premise_tol, cfg)?.0)
}

/// `|s'(1)c(1) - 1|` and `|s'(1) - c(1)|` at the zeros of `c'(1, ·)` where
/// `s(1, ·)` vanishes as well.
pub fn product_identity_check(
    q: &PotentialSpec,
    region: &SearchRegion,
    premise_tol: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<ProductRow>> {
    let n = spectra::find_eigenvalues(q, ProblemTag::N, region, cfg)?;
    Ok(factorization_rows(q, &n, premise_tol, cfg)?.1)
}

/// Outcome of matching two eigenvalue sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// Largest distance between matched pairs; `None` when the sets have
    /// different sizes.
    pub distance: Option<f64>,
    pub count_a: usize,
    pub count_b: usize,
    /// Both spectra were fully resolved.
    pub complete: bool,
    pub near_double: bool,
}

/// Greedy matching: repeatedly pairs the closest remaining elements.
pub fn match_sets(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    Some(worst)
}

fn matching_of(a: &SpectrumReport, b: &SpectrumReport, exclude_zero: bool) -> Matching {
    let keep = |r: &SpectrumReport| -> Vec<Complex64> {
        r.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat(e.mu).take(e.algebraic_order as usize))
            .filter(|mu| !exclude_zero || mu.norm() >= ZERO_EIGENVALUE)
            .collect()
    };
    let (sa, sb) = (keep(a), keep(b));
    Matching {
        distance: match_sets(&sa, &sb),
        count_a: sa.len(),
        count_b: sb.len(),
        complete: a.is_complete() && b.is_complete(),
        near_double: a.has_near_double() || b.has_near_double(),
    }
}

/// Matching distance between the spectra of two problems in `region`, with
/// eigenvalues of modulus below [`ZERO_EIGENVALUE`] dropped if asked.
pub fn spectra_equal(
    q: &PotentialSpec,
    tag_a: ProblemTag,
    tag_b: ProblemTag,
    region: &SearchRegion,
    exclude_zero: bool,
    cfg: &IntegratorConfig,
) -> Result<Matching> {
    let a = spectra::find_eigenvalues(q, tag_a, region, cfg)?;
    let b = spectra::find_eigenvalues(q, tag_b, region, cfg)?;
    Ok(matching_of(&a, &b, exclude_zero))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub residual: f64,
    pub tolerance: f64,
    /// The potential meets the hypothesis under which the identity is expected.
    pub applicable: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchCheck {
    pub distance: Option<f64>,
    pub tolerance: f64,
    pub count_a: usize,
    pub count_b: usize,
    pub complete: bool,
    pub near_double: bool,
    pub passed: bool,
}

impl MatchCheck {
    fn new(m: Matching, tolerance: f64) -> Self {
        MatchCheck {
            passed: m.distance.is_some_and(|d| d < tolerance),
            distance: m.distance,
            tolerance,
            count_a: m.count_a,
            count_b: m.count_b,
            complete: m.complete,
            near_double: m.near_double,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublenessEntry {
    pub tag: ProblemTag,
    pub mu: Complex64,
    pub algebraic_order: u32,
    pub geometric_multiplicity: u8,
    pub monodromy_residual: f64,
    pub is_lowest: bool,
    pub near_double: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Consistent,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Measured truth of the condition on the potential.
    pub hypothesis: bool,
    /// Measured truth of the spectral statement.
    pub conclusion: bool,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub header: Header,
    pub potential_id: String,
    /// `μ*` with the normalized potential equal to `q - μ*`.
    pub normalization_shift: Complex64,
    /// Conditions on the potential as given.
    pub condition_report: ConditionReport,
    /// Conditions on the normalized potential.
    pub normalized_condition_report: ConditionReport,
    pub identities: BTreeMap<String, IdentityCheck>,
    pub spectra_matches: BTreeMap<String, MatchCheck>,
    pub zero_in_neumann: bool,
    pub factorization: Vec<FactorizationRow>,
    pub products: Vec<ProductRow>,
    pub doubleness: Vec<DoublenessEntry>,
    /// P and AP spectra of the normalized potential were fully resolved.
    pub doubleness_complete: bool,
    pub verdicts: BTreeMap<String, Verdict>,
}

pub const VERDICT_REFLECTION: &str = "reflection_symmetry";
pub const VERDICT_DIRICHLET_NEUMANN: &str = "dirichlet_neumann";
pub const VERDICT_DOUBLE: &str = "double_eigenvalues";

pub const MATCH_DN_ND: &str = "DN_vs_ND";
pub const MATCH_D_N: &str = "D_vs_N";

fn verdict(hypothesis: bool, conclusion: bool, ambiguous: Option<&str>, what: &str) -> Verdict {
    let (status, why) = match ambiguous {
        Some(reason) => (VerdictStatus::Inconclusive, reason.to_string()),
        None if hypothesis == conclusion => (
            VerdictStatus::Consistent,
            format!("condition {} and {what} {}", yes(hypothesis), yes(conclusion)),
        ),
        None => (
            VerdictStatus::Violated,
            format!("condition {} but {what} {}", yes(hypothesis), yes(conclusion)),
        ),
    };
    Verdict {
        status,
        hypothesis,
        conclusion,
        explanation: why,
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

/// Verdicts as a function of the report's stored measurements only.
pub fn recompute_verdicts(r: &VerificationReport) -> BTreeMap<String, Verdict> {
    let raw = r.condition_report.recompute_verdicts();
    let norm = r.normalized_condition_report.recompute_verdicts();
    let mut out = BTreeMap::new();

    let ambiguity = |m: &MatchCheck| -> Option<&'static str> {
        if !m.complete {
            Some("a spectrum has unresolved boxes")
        } else if m.near_double {
            Some("a spectrum contains a near-double pair")
        } else {
            None
        }
    };

    let matched = |m: &MatchCheck| m.distance.is_some_and(|d| d < m.tolerance);

    let dn = &r.spectra_matches[MATCH_DN_ND];
    out.insert(
        VERDICT_REFLECTION.to_string(),
        verdict(
            raw.symmetry_unit,
            matched(dn),
            ambiguity(dn),
            "the DN and ND spectra coincide:",
        ),
    );

    let dnn = &r.spectra_matches[MATCH_D_N];
    out.insert(
        VERDICT_DIRICHLET_NEUMANN.to_string(),
        verdict(
            raw.condition_bb,
            matched(dnn) && r.zero_in_neumann,
            ambiguity(dnn),
            "D and N spectra agree away from zero with 0 in the N spectrum:",
        ),
    );

    let p_double = r
        .doubleness
        .iter()
        .filter(|e| e.tag == ProblemTag::P && !e.is_lowest)
        .all(|e| e.geometric_multiplicity == 2);
    let ap_double = r
        .doubleness
        .iter()
        .filter(|e| e.tag == ProblemTag::AP)
        .all(|e| e.geometric_multiplicity == 2);
    let ambiguous = if !r.doubleness_complete {
        Some("a P or AP spectrum has unresolved boxes")
    } else if r.doubleness.iter().any(|e| e.near_double) {
        Some("a P or AP spectrum contains a near-double pair")
    } else {
        None
    };
    out.insert(
        VERDICT_DOUBLE.to_string(),
        verdict(
            norm.condition_b || norm.symmetry_half,
            p_double || ap_double,
            ambiguous,
            "all non-lowest P or all AP eigenvalues are geometrically double:",
        ),
    );
    out
}

/// Runs every check on `q` and assembles the report.
///
/// Separated-problem matchings use `q` as given; the double-eigenvalue
/// classification, the half-interval identities and the monodromy checks use
/// `q` shifted so that 0 is a Neumann eigenvalue on `[0, 1/2]`.
pub fn doubleness_report(q: &PotentialSpec, cfg: &HarnessConfig) -> Result<VerificationReport> {
    q.validate()?;
    cfg.integrator.validate()?;
    let icfg = &cfg.integrator;
    let tol = &cfg.tolerances;
    let (qn, shift) = spectra::normalize_neumann(q, Span::Half, icfg)?;
    let region_raw = cfg.region.unwrap_or_else(|| spectra::default_region(q));
    let region_norm = cfg.region.map(|r| r.translated(-shift)).unwrap_or_else(|| spectra::default_region(&qn));

    let cond = condition_report(q, cfg.norm, None);
    let cond_n = condition_report(&qn, cfg.norm, None);

    let mut identities = BTreeMap::new();
    let b = identity_residual_b(&qn, &cfg.mu_grid, icfg)?;
    let s = identity_residual_sym(&qn, &cfg.mu_grid, icfg)?;
    let mut put = |name: &str, residual: f64, applicable: bool| {
        identities.insert(
            name.to_string(),
            IdentityCheck {
                residual,
                tolerance: tol.identities,
                applicable,
                passed: residual < tol.identities,
            },
        );
    };
    put("neumann_dirichlet_half", b.at_half, cond_n.verdicts.condition_b);
    put("neumann_dirichlet_three_half", b.at_three_half, cond_n.verdicts.condition_b);
    put("reflection_half", s.at_half, cond_n.verdicts.symmetry_half);
    put("reflection_three_half", s.at_three_half, cond_n.verdicts.symmetry_half);

    let find = |pot: &PotentialSpec, tag, region: &SearchRegion| spectra::find_eigenvalues(pot, tag, region, icfg);
    let dn = find(q, ProblemTag::DN, &region_raw)?;
    let nd = find(q, ProblemTag::ND, &region_raw)?;
    let d = find(q, ProblemTag::D, &region_raw)?;
    let n = find(q, ProblemTag::N, &region_raw)?;
    let mut spectra_matches = BTreeMap::new();
    spectra_matches.insert(MATCH_DN_ND.to_string(), MatchCheck::new(matching_of(&dn, &nd, false), tol.verdicts));
    spectra_matches.insert(MATCH_D_N.to_string(), MatchCheck::new(matching_of(&d, &n, true), tol.verdicts));
    let zero_in_neumann = n.eigenvalues.iter().any(|e| e.mu.norm() < ZERO_EIGENVALUE);

    let n_norm = find(&qn, ProblemTag::N, &region_norm)?;
    let (factorization, products) = factorization_rows(&qn, &n_norm, tol.identities, icfg)?;

    let p = find(&qn, ProblemTag::P, &region_norm)?;
    let ap = find(&qn, ProblemTag::AP, &region_norm)?;
    let doubleness = p
        .eigenvalues
        .iter()
        .chain(&ap.eigenvalues)
        .map(|e| DoublenessEntry {
            tag: e.tag,
            mu: e.mu,
            algebraic_order: e.algebraic_order,
            geometric_multiplicity: e.geometric_multiplicity.unwrap_or(1),
            monodromy_residual: e.monodromy_residual.unwrap_or(f64::INFINITY),
            is_lowest: e.is_lowest,
            near_double: e.near_double,
        })
        .collect();

    let config = serde_json::json!({
        "potential": q.to_json_value(),
        "harness": serde_json::to_value(cfg)?,
    });
    let mut report = VerificationReport {
        header: Header::new(&config, *tol),
        potential_id: q.id().unwrap_or(q.kind().name()).to_string(),
        normalization_shift: shift,
        condition_report: cond,
        normalized_condition_report: cond_n,
        identities,
        spectra_matches,
        zero_in_neumann,
        factorization,
        products,
        doubleness,
        doubleness_complete: p.is_complete() && ap.is_complete(),
        verdicts: BTreeMap::new(),
    };
    report.verdicts = recompute_verdicts(&report);
    Ok(report)
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.verdicts.values().any(|v| v.status == VerdictStatus::Inconclusive)
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.header.comment_line());
        let _ = writeln!(s, "potential: {}", self.potential_id);
        let _ = writeln!(
            s,
            "normalization shift: {:.6e} {:+.6e}i",
            self.normalization_shift.re, self.normalization_shift.im
        );
        let c = &self.condition_report;
        let _ = writeln!(s, "conditions ({:?} norm, tolerance {:e}):", c.norm_used, c.tolerance);
        let _ = writeln!(s, "  B         {:.3e}", self.normalized_condition_report.residual_b);
        let _ = writeln!(s, "  BB        {:.3e}", c.residual_bb);
        let _ = writeln!(s, "  sym half  {:.3e}", c.residual_sym_half);
        let _ = writeln!(s, "  sym unit  {:.3e}", c.residual_sym_unit);
        let _ = writeln!(s, "identities:");
        for (name, id) in &self.identities {
            let _ = writeln!(
                s,
                "  {name:<30} {:.3e} {}{}",
                id.residual,
                if id.passed { "pass" } else { "fail" },
                if id.applicable { "" } else { " (not applicable)" }
            );
        }
        let _ = writeln!(s, "spectra matches:");
        for (name, m) in &self.spectra_matches {
            let d = m.distance.map_or("size mismatch".to_string(), |d| format!("{d:.3e}"));
            let _ = writeln!(s, "  {name:<10} {d} ({} vs {})", m.count_a, m.count_b);
        }
        let _ = writeln!(s, "P/AP eigenvalues:");
        for e in &self.doubleness {
            let _ = writeln!(
                s,
                "  {:<3} {:>14.8} {:+.2e}i  order {}  multiplicity {}{}",
                e.tag.name(),
                e.mu.re,
                e.mu.im,
                e.algebraic_order,
                e.geometric_multiplicity,
                if e.is_lowest { "  lowest" } else { "" }
            );
        }
        let _ = writeln!(s, "verdicts:");
        for (name, v) in &self.verdicts {
            let _ = writeln!(s, "  {name:<20} {:?}: {}", v.status, v.explanation);
        }
        s
    }
}
