//! The `ess` binary end to end: golden outputs, exit codes, and
//! synthesize -> verify roundtrips through files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn ess(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ess")).args(args).output().expect("spawn ess")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bell_pair_scheme_matches_golden() {
    let out = ess(&["threshold", "--p", "1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let want = std::fs::read_to_string(golden("bell_threshold_11.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), want);
}

#[test]
fn outputs_are_byte_stable() {
    let runs = [
        vec!["threshold", "--p", "2", "--q", "2"],
        vec!["summon", "--ring", "4"],
        vec!["rscode", "--n", "5", "--k", "1", "--r", "1", "--field", "5"],
    ];
    for args in runs {
        let a = ess(&args);
        let b = ess(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
}

#[test]
fn rank_counterexample_is_rejected() {
    let s = golden("rank_counterexample.json");
    let out = ess(&["validate", path_str(&s), "--mode", "known"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "infeasible");
}

#[test]
fn monogamy_failure_is_rejected() {
    let s = golden("path_monogamy.json");
    let out = ess(&["validate", path_str(&s), "--mode", "unknown"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "infeasible");
}

fn roundtrip(structure: &str, mode: &str) {
    let dir = tempfile::tempdir().unwrap();
    let s = golden(structure);
    let scheme = dir.path().join("scheme.json");
    let out = ess(&["synthesize", path_str(&s), "--mode", mode, "-o", path_str(&scheme)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = ess(&["verify", path_str(&scheme), path_str(&s), "--oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn known_roundtrip() {
    roundtrip("two_components.json", "known");
}

#[test]
fn unknown_roundtrip() {
    roundtrip("two_components.json", "unknown");
}

#[test]
fn threshold_structure_file_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    let structure = dir.path().join("structure.json");
    let out = ess(&["threshold", "--p", "2", "--q", "1", "-o", path_str(&scheme), "--structure", path_str(&structure)]);
    assert_eq!(out.status.code(), Some(0));
    let out = ess(&["verify", path_str(&scheme), path_str(&structure), "--oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn qss_for_two_of_three() {
    let out = ess(&["qss", path_str(&golden("threshold_23.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn tampered_scheme_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    let structure = dir.path().join("structure.json");
    assert_eq!(ess(&["threshold", "--p", "1", "--q", "1", "-o", path_str(&scheme), "--structure", path_str(&structure)]).status.code(), Some(0));
    // Swap the Bell state for a product state |00>.
    let text = std::fs::read_to_string(&scheme).unwrap().replace("X:11|Z:00", "X:00|Z:10");
    std::fs::write(&scheme, text).unwrap();
    let out = ess(&["verify", path_str(&scheme), path_str(&structure)]);
    assert_eq!(out.status.code(), Some(1));
}
