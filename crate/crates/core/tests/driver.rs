mod common;

use std::time::Duration;

use fixkit::driver::{run_repair, FlMode, PatchVerdict, RepairConfig, RepairStatus};
use fixkit::harness::{load_bug, load_corpus};
use fixkit::lang::interp::RunConfig;

fn bug(id: &str) -> fixkit::harness::BugCase {
    load_bug(&common::corpus_root().join(id), &RunConfig::default()).unwrap()
}

fn perfect() -> RepairConfig {
    RepairConfig { mode: FlMode::Perfect, budget: None, ..RepairConfig::default() }
}

#[test]
fn operator_bug_is_fixed_correctly() {
    let out = run_repair(&bug("fp11-1-operator"), &perfect()).unwrap();
    assert_eq!(out.status, RepairStatus::FullyFixed);
    assert!(out.correct);
    let patch = out.plausible_patch.unwrap();
    assert_eq!(patch.pattern_id, "FP11.1");
    assert_eq!(patch.verdict, PatchVerdict::Plausible);
    assert!(patch.diff.contains("+++ b/src/"), "{}", patch.diff);
}

#[test]
fn zero_budget_validates_nothing() {
    let config = RepairConfig { budget: Some(Duration::ZERO), ..perfect() };
    let out = run_repair(&bug("fp11-1-operator"), &config).unwrap();
    assert_eq!(out.status, RepairStatus::Unfixed);
    assert_eq!(out.candidates_validated, 0);
    assert!(out.validations.is_empty());
}

#[test]
fn normal_fl_ranks_the_buggy_statement() {
    let out = run_repair(&bug("fp11-1-operator"), &RepairConfig { budget: None, ..RepairConfig::default() }).unwrap();
    let pos = out.fl_position.expect("buggy statement is covered by a failing test");
    assert!(pos >= 1 && pos <= out.suspicious_statements);
}

/// Bugs whose first plausible patch comes from a different pattern than the
/// one they were seeded with.
const CROSS_FIXES: [(&str, &str, bool); 2] = [("fp08-2-cast-divisor", "FP8.1", false), ("fp08-3-float-literal", "FP8.1", true)];

#[test]
fn corpus_bugs_are_fixed_by_their_seeded_pattern() {
    let bugs = load_corpus(&common::corpus_root(), &RunConfig::default()).unwrap();
    for b in &bugs {
        let out = run_repair(b, &perfect()).unwrap();
        let patch = out.plausible_patch.unwrap_or_else(|| panic!("{} unfixed", b.id));
        match CROSS_FIXES.iter().find(|(id, ..)| *id == b.id) {
            Some((_, by, correct)) => {
                assert_eq!(patch.pattern_id, *by, "{}", b.id);
                assert_eq!(out.correct, *correct, "{}", b.id);
            }
            None => {
                assert_eq!(Some(&patch.pattern_id), b.expected_pattern.as_ref(), "{}", b.id);
                assert!(out.correct, "{}", b.id);
            }
        }
    }
}

#[test]
fn repeated_runs_validate_the_same_sequence() {
    let b = bug("fp13-1-variable");
    let config = RepairConfig { exhaustive: true, ..perfect() };
    let first = run_repair(&b, &config).unwrap();
    let second = run_repair(&b, &config).unwrap();
    assert_eq!(first.validations, second.validations);
    assert_eq!(first.plausible_patches, second.plausible_patches);
}
