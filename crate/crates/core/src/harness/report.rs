//! Benchmark reports: a JSON document and a text table rendered from it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::driver::{FlMode, PatchReport, RepairOutcome, RepairStatus};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BugStatus {
    FullyFixed,
    PartiallyFixed,
    Unfixed,
    Error,
}

impl From<RepairStatus> for BugStatus {
    fn from(s: RepairStatus) -> Self {
        match s {
            RepairStatus::FullyFixed => BugStatus::FullyFixed,
            RepairStatus::PartiallyFixed => BugStatus::PartiallyFixed,
            RepairStatus::Unfixed => BugStatus::Unfixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BugRow {
    pub id: String,
    pub expected_pattern: Option<String>,
    pub status: BugStatus,
    pub correct: bool,
    /// Pattern of the selected plausible patch.
    pub fixed_by: Option<String>,
    pub candidates_generated: usize,
    pub candidates_validated: usize,
    pub fl_position: Option<usize>,
    pub suspicious_statements: usize,
    pub plausible_patch: Option<PatchReport>,
    pub plausible_count: usize,
    pub partial_patches: Vec<PatchReport>,
    pub error: Option<String>,
}

impl BugRow {
    pub fn from_outcome(o: &RepairOutcome) -> Self {
        BugRow {
            id: o.bug_id.clone(),
            expected_pattern: o.expected_pattern.clone(),
            status: o.status.into(),
            correct: o.correct,
            fixed_by: o.plausible_patch.as_ref().map(|p| p.pattern_id.clone()),
            candidates_generated: o.candidates_generated,
            candidates_validated: o.candidates_validated,
            fl_position: o.fl_position,
            suspicious_statements: o.suspicious_statements,
            plausible_patch: o.plausible_patch.clone(),
            plausible_count: o.plausible_patches.len(),
            partial_patches: o.partial_patches.clone(),
            error: None,
        }
    }

    pub fn from_error(id: &str, expected_pattern: Option<String>, error: String) -> Self {
        BugRow {
            id: id.to_string(),
            expected_pattern,
            status: BugStatus::Error,
            correct: false,
            fixed_by: None,
            candidates_generated: 0,
            candidates_validated: 0,
            fl_position: None,
            suspicious_statements: 0,
            plausible_patch: None,
            plausible_count: 0,
            partial_patches: Vec::new(),
            error: Some(error),
        }
    }
}

/// Correct and plausible counts, written `correct/plausible` in tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixCounts {
    pub correct: usize,
    pub plausible: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    /// Bugs seeded for this pattern.
    pub seeded: usize,
    /// Bugs whose selected patch came from this pattern.
    pub fixed: FixCounts,
    /// Mean rank of the buggy statement over the bugs fixed by this pattern.
    pub mean_fl_position: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub bugs: usize,
    pub fully_fixed: FixCounts,
    pub partially_fixed: usize,
    pub unfixed: usize,
    pub errors: usize,
    pub candidates_generated: usize,
    pub candidates_validated: usize,
    pub mean_fl_position_fixed: Option<f64>,
    pub mean_fl_position_unfixed: Option<f64>,
    pub per_pattern: BTreeMap<String, PatternRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub fl_mode: FlMode,
    pub exhaustive: bool,
    /// Per-bug budget in seconds; `None` is unlimited.
    pub timeout_secs: Option<u64>,
    pub max_suspicious: usize,
    pub patterns: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub settings: RunSettings,
    pub bugs: Vec<BugRow>,
    pub aggregates: Aggregates,
}

fn mean(values: impl Iterator<Item = usize>) -> Option<f64> {
    let v: Vec<usize> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<usize>() as f64 / v.len() as f64)
}

/// Sum the per-bug rows.
pub fn aggregate(rows: &[BugRow]) -> Aggregates {
    let mut a = Aggregates { bugs: rows.len(), ..Default::default() };
    for r in rows {
        match r.status {
            BugStatus::FullyFixed => {
                a.fully_fixed.plausible += 1;
                a.fully_fixed.correct += usize::from(r.correct);
            }
            BugStatus::PartiallyFixed => a.partially_fixed += 1,
            BugStatus::Unfixed => a.unfixed += 1,
            BugStatus::Error => a.errors += 1,
        }
        a.candidates_generated += r.candidates_generated;
        a.candidates_validated += r.candidates_validated;
        if let Some(p) = &r.expected_pattern {
            a.per_pattern.entry(p.clone()).or_default().seeded += 1;
        }
        if let Some(p) = &r.fixed_by {
            let row = a.per_pattern.entry(p.clone()).or_default();
            row.fixed.plausible += 1;
            row.fixed.correct += usize::from(r.correct);
        }
    }
    for (id, row) in a.per_pattern.iter_mut() {
        row.mean_fl_position = mean(rows.iter().filter(|r| r.fixed_by.as_ref() == Some(id)).filter_map(|r| r.fl_position));
    }
    let fixed = |r: &&BugRow| r.status == BugStatus::FullyFixed;
    a.mean_fl_position_fixed = mean(rows.iter().filter(fixed).filter_map(|r| r.fl_position));
    a.mean_fl_position_unfixed =
        mean(rows.iter().filter(|r| matches!(r.status, BugStatus::PartiallyFixed | BugStatus::Unfixed)).filter_map(|r| r.fl_position));
    a
}

impl RunReport {
    pub fn new(settings: RunSettings, mut bugs: Vec<BugRow>) -> Self {
        bugs.sort_by(|a, b| a.id.cmp(&b.id));
        let aggregates = aggregate(&bugs);
        RunReport { schema_version: SCHEMA_VERSION, settings, bugs, aggregates }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

fn opt_pos(p: Option<f64>) -> String {
    p.map_or("-".to_string(), |v| format!("{v:.1}"))
}

fn status_label(s: BugStatus) -> &'static str {
    match s {
        BugStatus::FullyFixed => "fixed",
        BugStatus::PartiallyFixed => "partial",
        BugStatus::Unfixed => "unfixed",
        BugStatus::Error => "error",
    }
}

/// Text rendering of a report. Every number comes from the report itself.
pub fn render_table(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:<8} {:<8} {:<8} {:<7} {:>6} {:>6} {:>5}", "bug", "seeded", "status", "pattern", "correct", "gen", "valid", "fl");
    for r in &report.bugs {
        let _ = writeln!(
            out,
            "{:<28} {:<8} {:<8} {:<8} {:<7} {:>6} {:>6} {:>5}",
            r.id,
            r.expected_pattern.as_deref().unwrap_or("-"),
            status_label(r.status),
            r.fixed_by.as_deref().unwrap_or("-"),
            if r.correct { "yes" } else { "no" },
            r.candidates_generated,
            r.candidates_validated,
            r.fl_position.map_or("-".to_string(), |p| p.to_string()),
        );
        if let Some(e) = &r.error {
            let _ = writeln!(out, "    error: {e}");
        }
    }
    let a = &report.aggregates;
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<10} {:>8} {:>8} {:>8}", "pattern", "seeded", "fixed", "mean fl");
    for (id, row) in &a.per_pattern {
        let _ = writeln!(
            out,
            "{:<10} {:>8} {:>8} {:>8}",
            id,
            row.seeded,
            format!("{}/{}", row.fixed.correct, row.fixed.plausible),
            opt_pos(row.mean_fl_position)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "bugs: {}", a.bugs);
    let _ = writeln!(out, "fully fixed (correct/plausible): {}/{}", a.fully_fixed.correct, a.fully_fixed.plausible);
    let _ = writeln!(out, "partially fixed: {}", a.partially_fixed);
    let _ = writeln!(out, "unfixed: {}", a.unfixed);
    let _ = writeln!(out, "errors: {}", a.errors);
    let _ = writeln!(out, "candidates generated/validated: {}/{}", a.candidates_generated, a.candidates_validated);
    let _ = writeln!(
        out,
        "mean fl position fixed/unfixed: {}/{}",
        opt_pos(a.mean_fl_position_fixed),
        opt_pos(a.mean_fl_position_unfixed)
    );
    out
}
