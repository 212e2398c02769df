//! End-to-end checks of the command-line interface and its exit-code
//! contract: 0 tough/accept, 1 star branch, 2 invalid input, 3 rejected.

use std::path::PathBuf;
use std::process::{Command, Output};

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../instances/{name}.json"))
}

fn combdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combdual"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_reports_critical_patterns() {
    let out = combdual(&["analyze", instance("graded_chain").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("{s0..sn}"), "{text}");
    assert!(text.contains("tough"), "{text}");

    let out = combdual(&["analyze", instance("finite_path").to_str().unwrap()]);
    assert!(stdout(&out).contains("no critical vertex sets"));

    let out = combdual(&[
        "analyze",
        instance("fan_one_class").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["tough"], serde_json::Value::Bool(false));
}

#[test]
fn analyze_malformed_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = combdual(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decide_exit_codes_match_branches() {
    let dir = tempfile::tempdir().unwrap();
    let star_path = dir.path().join("star.json");
    let out = combdual(&[
        "decide",
        instance("fan_one_class").to_str().unwrap(),
        "--out",
        star_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "star branch exits 1");

    let tough_path = dir.path().join("tough.json");
    let out = combdual(&[
        "decide",
        instance("graded_chain").to_str().unwrap(),
        "--out",
        tough_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "tough branch exits 0");

    // Round trip: verify accepts the fresh certificates.
    let out = combdual(&[
        "verify",
        instance("graded_chain").to_str().unwrap(),
        tough_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: accept"));

    let out = combdual(&[
        "verify",
        instance("fan_one_class").to_str().unwrap(),
        star_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Digest mismatch: certificate against the wrong instance.
    let out = combdual(&[
        "verify",
        instance("finite_path").to_str().unwrap(),
        tough_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_tampered_certificate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    combdual(&[
        "decide",
        instance("graded_chain").to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    // Flip the spine-pair rule off; the pair schedule breaks.
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replace("\"spinePairRule\": true", "\"spinePairRule\": false");
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();
    let out = combdual(&[
        "verify",
        instance("graded_chain").to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("verdict: reject"));
}

#[test]
fn witness_writes_star_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.json");
    let out = combdual(&[
        "witness",
        instance("fan_one_class").to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = combdual(&[
        "verify",
        instance("fan_one_class").to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = combdual(&["witness", instance("graded_chain").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("tough"));
}

#[test]
fn materialize_dot_output() {
    let out = combdual(&[
        "materialize",
        instance("graded_chain").to_str().unwrap(),
        "--depth",
        "1",
        "--copies",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("graph truncation {"));
    assert!(text.contains("label=\"s0\""));
    assert!(text.contains("label=\"g0.1.0.0\""));
    assert_eq!(text.matches(" -- ").count(), 4);
}

#[test]
fn materialize_budget_exceeded_exits_2() {
    let out = combdual(&[
        "materialize",
        instance("graded_chain").to_str().unwrap(),
        "--depth",
        "100000",
        "--copies",
        "100000",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_override_via_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_combdual"))
        .args([
            "materialize",
            instance("graded_chain").to_str().unwrap(),
            "--depth",
            "12",
            "--copies",
            "5",
        ])
        .env("COMBDUAL_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes_and_mutant_fails() {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    let out = combdual(&[
        "selftest",
        "--corpus",
        corpus.to_str().unwrap(),
        "--count",
        "5",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = combdual(&[
        "selftest",
        "--corpus",
        corpus.to_str().unwrap(),
        "--count",
        "3",
        "--inject-mutant",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let empty = tempfile::tempdir().unwrap();
    let out = combdual(&["selftest", "--corpus", empty.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
