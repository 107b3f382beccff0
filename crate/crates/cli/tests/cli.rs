use std::path::PathBuf;
use std::process::{Command, Output};

fn fixkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixkit")).args(args).output().unwrap()
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn seed_check_verifies_the_corpus() {
    let out = fixkit(&["bench", corpus().to_str().unwrap(), "--seed-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "35 bug(s) verified");
}

#[test]
fn repair_prints_table_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let bug = corpus().join("fp11-1-operator");
    let out = fixkit(&["repair", bug.to_str().unwrap(), "--perfect-fl", "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("fp11-1-operator"));
    assert!(text.contains("fully fixed (correct/plausible): 1/1"), "{text}");
    assert!(text.contains("+++ b/src/"), "{text}");
    let json = std::fs::read_to_string(report).unwrap();
    assert!(json.contains("\"schema_version\": 1"));
}

#[test]
fn bad_arguments_exit_with_usage_error() {
    assert_eq!(fixkit(&["bench"]).status.code(), Some(1));
    let root = corpus();
    let out = fixkit(&["bench", root.to_str().unwrap(), "--patterns", "FP99"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FP99"));
}

#[test]
fn missing_bug_directory_is_a_corpus_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fixkit(&["repair", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let out = fixkit(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("bench"));
}
