#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hillspec"))
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Replaces the tool version so outputs compare across releases.
pub fn pin_version(text: &str) -> String {
    let v = env!("CARGO_PKG_VERSION");
    text.replace(&format!("# hillspec {v} "), "# hillspec VERSION ")
        .replace(&format!("\"version\": \"{v}\""), "\"version\": \"VERSION\"")
}

fn tokens(text: &str) -> Vec<&str> {
    text.split(|c: char| c.is_whitespace() || ",[]{}:\"".contains(c))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Compares two outputs token by token; numeric tokens may differ by
/// `tol * (1 + |expected|)`.
pub fn assert_close_text(actual: &str, expected: &str, tol: f64, what: &str) {
    let a = tokens(actual);
    let e = tokens(expected);
    assert_eq!(a.len(), e.len(), "{what}: token count differs\n--- actual\n{actual}\n--- expected\n{expected}");
    for (i, (x, y)) in a.iter().zip(&e).enumerate() {
        if x == y {
            continue;
        }
        let num = |t: &str| t.trim_end_matches('i').parse::<f64>();
        match (num(x), num(y)) {
            (Ok(u), Ok(v)) => assert!(
                (u - v).abs() <= tol * (1.0 + v.abs()),
                "{what}: token {i} is {x}, expected {y}"
            ),
            _ => panic!("{what}: token {i} is `{x}`, expected `{y}`"),
        }
    }
}

/// Checks `actual` against the golden file, or rewrites the golden file
/// when `HILLSPEC_BLESS` is set.
pub fn check_golden(actual: &str, name: &str) {
    let path = golden(name);
    let actual = pin_version(actual);
    if std::env::var_os("HILLSPEC_BLESS").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()));
    assert_close_text(&actual, &expected, 1e-9, name);
}
