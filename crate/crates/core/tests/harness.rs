mod common;

use std::fs;
use std::path::Path;

use fixkit::catalog::PatternFilter;
use fixkit::driver::{FlMode, RepairConfig};
use fixkit::harness::{aggregate, apply_patch, load_bug, load_corpus, run_suite, BugStatus, CorpusError, PatchError};
use fixkit::lang::interp::RunConfig;

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        let target = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_dir(&p, &target);
        } else {
            fs::copy(&p, &target).unwrap();
        }
    }
}

#[test]
fn empty_corpus_loads_as_empty() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_corpus(dir.path(), &RunConfig::default()).unwrap().is_empty());
}

#[test]
fn ground_truth_that_does_not_fix_names_the_bug() {
    let dir = tempfile::tempdir().unwrap();
    let bug = dir.path().join("half-fixed");
    copy_dir(&common::fixture("two-fault"), &bug);
    // only the first fault is repaired
    let patch = fs::read_to_string(bug.join("fix.patch")).unwrap();
    let first_hunk_only = patch.replace("-        return x * 2;\n+        return x / 2;\n", "         return x * 2;\n");
    fs::write(bug.join("fix.patch"), first_hunk_only).unwrap();

    let err = load_corpus(dir.path(), &RunConfig::default()).unwrap_err();
    assert!(matches!(err, CorpusError::NotFixing { .. }), "{err}");
    assert_eq!(err.bug(), "two-fault");
    assert!(err.to_string().contains("test_half"), "{err}");
}

#[test]
fn line_without_statement_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bug = dir.path().join("bad-line");
    copy_dir(&common::fixture("two-fault"), &bug);
    let toml = fs::read_to_string(bug.join("bug.toml")).unwrap().replace("3], [", "4], [");
    fs::write(bug.join("bug.toml"), toml).unwrap();
    let err = load_bug(&bug, &RunConfig::default()).unwrap_err();
    assert!(matches!(err, CorpusError::NoStatement { line: 4, .. }), "{err}");
}

#[test]
fn conflicting_patch_is_reported() {
    let files = vec![("src/A.mj".to_string(), "class A {\n}\n".to_string())];
    let patch = "--- a/src/A.mj\n+++ b/src/A.mj\n@@ -1,2 +1,2 @@\n-class B {\n+class C {\n }\n";
    assert!(matches!(apply_patch(&files, patch), Err(PatchError::Conflict(_))));
    let unknown = patch.replace("src/A.mj", "src/Z.mj");
    assert!(matches!(apply_patch(&files, &unknown), Err(PatchError::UnknownFile(_))));
}

#[test]
fn pattern_filter_restricts_fixes() {
    let bugs = load_corpus(&common::corpus_root(), &RunConfig::default()).unwrap();
    let config = RepairConfig {
        mode: FlMode::Perfect,
        budget: None,
        patterns: PatternFilter::parse("FP15").unwrap(),
        ..RepairConfig::default()
    };
    let report = run_suite(&bugs, &config);
    assert_eq!(report.settings.patterns, "FP15");
    for row in &report.bugs {
        let expected_fp15 = row.expected_pattern.as_deref().is_some_and(|p| p.starts_with("FP15"));
        if let Some(by) = &row.fixed_by {
            assert!(by.starts_with("FP15"), "{} fixed by {by}", row.id);
        }
        if expected_fp15 {
            assert_eq!(row.status, BugStatus::FullyFixed, "{}", row.id);
        }
    }
    assert_eq!(report.aggregates, aggregate(&report.bugs));
    let fixed = report.bugs.iter().filter(|r| r.status == BugStatus::FullyFixed).count();
    assert_eq!(report.aggregates.fully_fixed.plausible, fixed);
    assert_eq!(report.aggregates.bugs, bugs.len());
}
