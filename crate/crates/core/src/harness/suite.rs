//! Batch runs over a corpus.

use rayon::prelude::*;

use crate::driver::{run_repair, RepairConfig};

use super::corpus::BugCase;
use super::report::{BugRow, RunReport, RunSettings};

pub fn settings_of(config: &RepairConfig) -> RunSettings {
    RunSettings {
        fl_mode: config.mode,
        exhaustive: config.exhaustive,
        timeout_secs: config.budget.map(|b| b.as_secs()),
        max_suspicious: config.max_suspicious,
        patterns: config.patterns.to_string(),
    }
}

/// Repair one bug and turn the result into a report row.
pub fn repair_row(bug: &BugCase, config: &RepairConfig) -> BugRow {
    match run_repair(bug, config) {
        Ok(outcome) => BugRow::from_outcome(&outcome),
        Err(e) => {
            log::warn!("{}: {e}", bug.id);
            BugRow::from_error(&bug.id, bug.expected_pattern.clone(), e.to_string())
        }
    }
}

/// Repair every bug, in parallel, and assemble the report by bug id.
pub fn run_suite(bugs: &[BugCase], config: &RepairConfig) -> RunReport {
    let rows: Vec<BugRow> = bugs.par_iter().map(|b| repair_row(b, config)).collect();
    RunReport::new(settings_of(config), rows)
}
