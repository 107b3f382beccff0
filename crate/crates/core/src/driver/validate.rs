//! Running the test suite against a patched program.

use serde::{Deserialize, Serialize};

use crate::lang::check::CheckedProgram;
use crate::lang::interp::{discover_tests, RunConfig};
use crate::lang::{run_tests, CoverageTrace, Verdict};

/// Classification of a candidate against the baseline run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchVerdict {
    /// Every test passes.
    Plausible,
    /// Some previously failing tests pass and no previously passing test fails.
    Partial,
    Broken,
}

/// Test outcomes of one program, in suite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub traces: Vec<CoverageTrace>,
}

impl SuiteResult {
    pub fn failing(&self) -> usize {
        self.traces.iter().filter(|t| !t.verdict.is_pass()).count()
    }

    pub fn verdicts(&self) -> Vec<(&str, &Verdict)> {
        self.traces.iter().map(|t| (t.test.as_str(), &t.verdict)).collect()
    }
}

/// Run the suite file's tests on `program`.
pub fn run_suite_file(program: &CheckedProgram, suite_file: usize, config: &RunConfig) -> SuiteResult {
    let tests = discover_tests(program, suite_file);
    SuiteResult { traces: run_tests(program, &tests, config) }
}

/// Compare a candidate run with the baseline run of the buggy program.
pub fn classify(baseline: &SuiteResult, patched: &SuiteResult) -> PatchVerdict {
    let was = |name: &str| baseline.traces.iter().find(|t| t.test == name).map(|t| t.verdict.is_pass());
    if patched.traces.iter().all(|t| t.verdict.is_pass()) {
        return PatchVerdict::Plausible;
    }
    let mut fixed_some = false;
    for t in &patched.traces {
        match (was(&t.test), t.verdict.is_pass()) {
            (Some(true), false) | (None, false) => return PatchVerdict::Broken,
            (Some(false), true) => fixed_some = true,
            _ => {}
        }
    }
    if fixed_some {
        PatchVerdict::Partial
    } else {
        PatchVerdict::Broken
    }
}
