mod common;

use common::{bin, code, data, run};
use std::fs;

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_potential_file_names_the_path() {
    let out = run(&["spectrum", "--potential", "/nonexistent/q.json", "--tags", "D"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/q.json"));
}

#[test]
fn malformed_and_unknown_keys_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind": "zero", "colour": 1}"#).unwrap();
    assert_eq!(code(&run(&["check", s(&bad)])), 2);
    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&run(&["check", s(&bad)])), 2);
    fs::write(&bad, r#"{"kind": "zero", "grid_n": 17}"#).unwrap();
    assert_eq!(code(&run(&["check", s(&bad)])), 2);
}

#[test]
fn degenerate_segment_and_region() {
    let zero = data("zero.json");
    assert_eq!(code(&run(&["discriminant", "--potential", s(&zero), "--re", "5..5"])), 2);
    assert_eq!(code(&run(&["spectrum", "--potential", s(&zero), "--im", "1..-1"])), 2);
    assert_eq!(code(&run(&["spectrum", "--potential", s(&zero), "--tags", "Q"])), 2);
}

#[test]
fn unwritable_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let zero = data("zero.json");
    let out = run(&["kernel", "--potential", s(&zero), "--n", "16", "-o", s(&blocker.join("sub"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bad_integrator_override() {
    let zero = data("zero.json");
    assert_eq!(code(&run(&["spectrum", "--potential", s(&zero), "--rel-tol", "0.5"])), 2);
}

#[test]
fn bad_thread_count() {
    let zero = data("zero.json");
    let out = bin()
        .env("HILLSPEC_THREADS", "zero")
        .args(["check", s(&zero)])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = bin().env("HILLSPEC_THREADS", "1").args(["check", s(&zero)]).output().unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn unresolved_spectrum_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    // no subdivision allowed: the double roots cannot be isolated
    let out = run(&[
        "spectrum", "--potential", s(&zero), "--tags", "AP", "--re", "-1..500", "--max-depth", "0", "-o",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("spectrum_AP.csv").exists());
}

#[test]
fn explicit_tail_needs_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["construct", "--q2", "poly:16,-4", "--extension", "explicit_tail", "-o", s(&dir.path().join("t.json"))]);
    assert_eq!(code(&out), 2);
    let out = run(&["construct", "--q2", "poly:1", "--span", "unit", "--extension", "half_period", "-o", s(&dir.path().join("t.json"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn violated_verdict_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let sin = data("sin.json");
    let out = run(&["verify", "--potential", s(&sin), "-o", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("verification.json")).unwrap();
    assert!(report.contains("\"violated\""));
}

#[test]
fn construct_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bfam.json");
    let out = run(&["construct", "--q2", "poly:16,-4", "--extension", "half_period", "-o", s(&file)]);
    assert_eq!(code(&out), 0);
    let out = run(&["check", s(&file)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["potential_id"], "bfam");
    assert!(v["condition_report"]["residual_b"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["condition_report"]["verdicts"]["condition_b"], true);
}
