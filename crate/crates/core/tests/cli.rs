use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn notjs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_notjs")).args(args).output().unwrap()
}

fn corpus_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.njs"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_prints_json_report() {
    let f = corpus_file("context_identity");
    let o = notjs(&["analyze", f.to_str().unwrap(), "--sensitivity", "stack:2.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["entries"].as_array().unwrap().is_empty());
    assert!(v["counts"].is_object() && v["stats"].is_object());
}

#[test]
fn fail_on_errors_sets_exit_status() {
    let f = corpus_file("context_identity");
    let f = f.to_str().unwrap();
    assert_eq!(notjs(&["analyze", f, "--sensitivity", "fs"]).status.code(), Some(0));
    assert_eq!(notjs(&["analyze", f, "--sensitivity", "fs", "--fail-on-errors"]).status.code(), Some(1));
    assert_eq!(notjs(&["analyze", f, "--sensitivity", "stack:2.1", "--fail-on-errors"]).status.code(), Some(0));
}

#[test]
fn bad_sensitivity_is_a_usage_error() {
    let f = corpus_file("closures");
    let o = notjs(&["analyze", f.to_str().unwrap(), "--sensitivity", "stack:1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("h must be < k per stack:K.H"));
}

#[test]
fn unparsable_program_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.njs");
    std::fs::write(&bad, "(decl ((x 1)) (seq (:= x").unwrap();
    assert_eq!(notjs(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    let unbound = dir.path().join("unbound.njs");
    std::fs::write(&unbound, "(decl ((x 1)) (:= y x))").unwrap();
    assert_eq!(notjs(&["run", unbound.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(notjs(&["analyze", "/nonexistent.njs"]).status.code(), Some(2));
    assert_eq!(notjs(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn repeated_runs_print_identical_json() {
    let f = corpus_file("callbacks");
    let args = ["analyze", f.to_str().unwrap(), "--sensitivity", "sig:1.0", "--format", "json", "--no-timing"];
    assert_eq!(stdout(&notjs(&args)), stdout(&notjs(&args)));
}

#[test]
fn run_prints_result() {
    let o = notjs(&["run", corpus_file("recursion").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "=> 720");
}

#[test]
fn check_reports_zero_violations() {
    let o = notjs(&["check", corpus_file("exceptions").to_str().unwrap(), "--sensitivity", "fs", "--fuel", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 violations"));
}

#[test]
fn fuzz_and_bench_run() {
    let o = notjs(&["fuzz", "--seeds", "0..4", "--sensitivity-set", "fs,stack:2.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("8 cases"), "{}", stdout(&o));
    let o = notjs(&["bench", "--sensitivity-set", "fs,stack:1.0", "--sequential"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("context_identity"));
    assert_eq!(notjs(&["fuzz", "--seeds", "5..1"]).status.code(), Some(2));
}

#[test]
fn dump_prints_partition() {
    let o = notjs(&["analyze", corpus_file("straight_line").to_str().unwrap(), "--dump"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 13);
}
