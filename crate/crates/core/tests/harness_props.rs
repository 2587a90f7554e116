use hillspec::harness::{
    self, doubleness_report, recompute_verdicts, HarnessConfig, VerdictStatus, VerificationReport, MATCH_DN_ND,
    MATCH_D_N, VERDICT_DIRICHLET_NEUMANN, VERDICT_DOUBLE, VERDICT_REFLECTION,
};
use hillspec::{PotentialSpec, ProblemTag, SearchRegion};
use proptest::prelude::*;
use std::sync::OnceLock;

fn small_config() -> HarnessConfig {
    HarnessConfig {
        region: Some(SearchRegion::new(-12.0, 120.0, -5.0, 5.0)),
        ..HarnessConfig::default()
    }
}

fn free_report() -> &'static VerificationReport {
    static REPORT: OnceLock<VerificationReport> = OnceLock::new();
    REPORT.get_or_init(|| doubleness_report(&PotentialSpec::zero(), &small_config()).unwrap())
}

#[test]
fn free_potential_passes_everything_tightly() {
    let r = free_report();
    for (name, id) in &r.identities {
        assert!(id.applicable, "{name}");
        assert!(id.residual < 1e-8, "{name}: {}", id.residual);
    }
    for (name, m) in &r.spectra_matches {
        assert!(m.distance.is_some_and(|d| d < 1e-8), "{name}: {:?}", m.distance);
    }
    assert!(r.zero_in_neumann);
    assert!(r.verdicts.values().all(|v| v.status == VerdictStatus::Consistent));
    for row in &r.products {
        assert!(row.product_residual < 1e-8 && row.equality_residual < 1e-8);
    }
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let again = doubleness_report(&PotentialSpec::zero(), &small_config()).unwrap();
    let a = free_report().to_json().unwrap();
    assert_eq!(a, again.to_json().unwrap());
    let back = VerificationReport::from_json(&a).unwrap();
    assert_eq!(back.to_json().unwrap(), a);
    assert_eq!(recompute_verdicts(&back), back.verdicts);
    for key in ["condition_report", "identities", "spectra_matches", "doubleness", "verdicts"] {
        assert!(a.contains(&format!("\"{key}\"")), "{key}");
    }
}

#[test]
fn sine_fails_the_mixed_matching() {
    let sin = PotentialSpec::sine(1, 1.0);
    let region = SearchRegion::new(-12.0, 120.0, -5.0, 5.0);
    let m = harness::spectra_equal(&sin, ProblemTag::DN, ProblemTag::ND, &region, false, &Default::default()).unwrap();
    assert!(!m.distance.is_some_and(|d| d < 1e-5), "{:?}", m.distance);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Verdicts follow from the stored residuals and tolerances alone.
    #[test]
    fn verdicts_are_a_function_of_the_report(
        res in prop::array::uniform4(prop_oneof![0.0..1e-9f64, 1e-3..1.0f64]),
        dists in prop::array::uniform2(prop::option::of(prop_oneof![0.0..1e-9f64, 1e-3..1.0f64])),
        complete in any::<bool>(),
        zero_in_n in any::<bool>(),
        gms in prop::collection::vec(1u8..=2, 9),
    ) {
        let mut r = free_report().clone();
        r.condition_report.residual_sym_unit = res[0];
        r.condition_report.residual_bb = res[1];
        r.normalized_condition_report.residual_b = res[2];
        r.normalized_condition_report.residual_sym_half = res[3];
        r.spectra_matches.get_mut(MATCH_DN_ND).unwrap().distance = dists[0];
        r.spectra_matches.get_mut(MATCH_D_N).unwrap().distance = dists[1];
        r.spectra_matches.get_mut(MATCH_D_N).unwrap().complete = complete;
        r.zero_in_neumann = zero_in_n;
        for (e, &g) in r.doubleness.iter_mut().zip(&gms) {
            e.geometric_multiplicity = g;
        }
        let v = recompute_verdicts(&r);

        let tol = r.condition_report.tolerance;
        let mtol = r.spectra_matches[MATCH_DN_ND].tolerance;
        let matched = |d: Option<f64>| d.is_some_and(|d| d < mtol);
        let status = |h: bool, c: bool| if h == c { VerdictStatus::Consistent } else { VerdictStatus::Violated };

        prop_assert_eq!(v[VERDICT_REFLECTION].status, status(res[0] < tol, matched(dists[0])));
        let expected = if complete {
            status(res[1] < tol, matched(dists[1]) && zero_in_n)
        } else {
            VerdictStatus::Inconclusive
        };
        prop_assert_eq!(v[VERDICT_DIRICHLET_NEUMANN].status, expected);

        let p_all = r.doubleness.iter().filter(|e| e.tag == ProblemTag::P && !e.is_lowest).all(|e| e.geometric_multiplicity == 2);
        let ap_all = r.doubleness.iter().filter(|e| e.tag == ProblemTag::AP).all(|e| e.geometric_multiplicity == 2);
        prop_assert_eq!(v[VERDICT_DOUBLE].status, status(res[2] < tol || res[3] < tol, p_all || ap_all));
    }
}
