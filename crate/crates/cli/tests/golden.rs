//! Every subcommand on the free potential, compared with stored outputs.
//! Set `HILLSPEC_BLESS=1` to regenerate the stored files.

mod common;

use common::{check_golden, code, data, run};
use std::fs;

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    let out = run(&["spectrum", "--potential", s(&zero), "--tags", "P,AP", "--re", "-1..170", "-o", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for tag in ["P", "AP"] {
        let name = format!("spectrum_{tag}.csv");
        check_golden(&fs::read_to_string(dir.path().join(&name)).unwrap(), &name);
    }
}

#[test]
fn spectrum_json() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    let out = run(&[
        "spectrum", "--potential", s(&zero), "--tags", "D_half", "--re", "-1..200", "--format", "json", "-o",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    check_golden(&fs::read_to_string(dir.path().join("spectrum_D_half.json")).unwrap(), "spectrum_D_half.json");
}

#[test]
fn discriminant_files() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    let out = run(&[
        "discriminant", "--potential", s(&zero), "--re", "0..100", "--samples", "21", "--map-im", "-2..2",
        "--map-re-points", "6", "--map-im-points", "3", "-o", s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["discriminant_trace.csv", "discriminant_zero_map.csv"] {
        check_golden(&fs::read_to_string(dir.path().join(name)).unwrap(), name);
    }
}

#[test]
fn check_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    let file = dir.path().join("check.json");
    let out = run(&["check", s(&zero), "-o", s(&file)]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, fs::read_to_string(&file).unwrap());
    check_golden(&stdout, "check_zero.json");
}

#[test]
fn construct_zero_q2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("built.json");
    let out = run(&["construct", "--q2", "poly:0", "--extension", "half_period", "--id", "built", "-o", s(&file)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    check_golden(&fs::read_to_string(&file).unwrap(), "construct_zero.json");
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    let out = run(&["verify", "--potential", s(&zero), "-o", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    check_golden(&fs::read_to_string(dir.path().join("verification.json")).unwrap(), "verification_zero.json");
    check_golden(&fs::read_to_string(dir.path().join("verification.txt")).unwrap(), "verification_zero.txt");
}

#[test]
fn kernel_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let zero = data("zero.json");
    let out = run(&["kernel", "--potential", s(&zero), "--n", "16", "--x", "0.5,1", "--dump", "-o", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    check_golden(&fs::read_to_string(dir.path().join("kernel_summary.json")).unwrap(), "kernel_summary_zero.json");
    check_golden(&fs::read_to_string(dir.path().join("kernel.csv")).unwrap(), "kernel_zero.csv");
}
