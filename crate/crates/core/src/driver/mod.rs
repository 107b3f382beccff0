//! The repair loop: localize, match, schedule, validate.

mod schedule;
mod validate;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{normalize_equal, Action, DistanceMetric, Patch};
use crate::catalog::{apply_pattern, match_statement, pattern_index, realize, PatternFilter, CANDIDATE_CAP};
use crate::donor::{collect_donors, DonorSet};
use crate::fl::{build_spectrum, perfect_localization, position_of, rank, FlError, Suspicious};
use crate::harness::{file_diff, BugCase};
use crate::lang::check::{check_program, CheckedProgram};
use crate::lang::interp::RunConfig;
use crate::lang::{pretty_print, tracked_statements, SourceFile, StmtId};
use crate::site::Site;

pub use schedule::{schedule, ScheduleKey};
pub use validate::{classify, run_suite_file, PatchVerdict, SuiteResult};

/// Where the suspicious statement list comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlMode {
    /// The known buggy statements.
    Perfect,
    /// Ochiai ranking of the coverage spectrum.
    Normal,
}

#[derive(Clone, Debug)]
pub struct RepairConfig {
    pub mode: FlMode,
    /// `None` means no time limit.
    pub budget: Option<Duration>,
    pub max_suspicious: usize,
    /// Validate every candidate instead of stopping at the first plausible one.
    pub exhaustive: bool,
    pub patterns: PatternFilter,
    pub metric: DistanceMetric,
    pub run: RunConfig,
    pub cap: usize,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            mode: FlMode::Normal,
            budget: Some(Duration::from_secs(60)),
            max_suspicious: 50,
            exhaustive: false,
            patterns: PatternFilter::all(),
            metric: DistanceMetric::PathLength,
            run: RunConfig::default(),
            cap: CANDIDATE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairStatus {
    FullyFixed,
    PartiallyFixed,
    Unfixed,
}

/// A validated candidate as reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchReport {
    pub sequence_no: u64,
    pub pattern_id: String,
    pub action: Action,
    pub location: StmtId,
    pub line: usize,
    pub suspiciousness: f64,
    pub donor_distance: Option<usize>,
    pub verdict: PatchVerdict,
    pub correct: bool,
    /// Unified diff of the patched file.
    pub diff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub bug_id: String,
    pub expected_pattern: Option<String>,
    pub status: RepairStatus,
    pub plausible_patch: Option<PatchReport>,
    /// Every plausible patch found; more than one only in exhaustive mode.
    pub plausible_patches: Vec<PatchReport>,
    pub partial_patches: Vec<PatchReport>,
    /// Whether the selected plausible patch matches the ground truth.
    pub correct: bool,
    pub candidates_generated: usize,
    pub candidates_validated: usize,
    /// 1-based rank of the first buggy statement in the Ochiai list.
    pub fl_position: Option<usize>,
    pub suspicious_statements: usize,
    #[serde(skip)]
    pub wall_time: Duration,
    /// Sequence numbers and verdicts of validated candidates, in order.
    #[serde(skip)]
    pub validations: Vec<(u64, PatchVerdict)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("program does not type-check: {0}")]
    IllTyped(String),
    #[error("ground-truth program does not type-check: {0}")]
    IllTypedFix(String),
    #[error("the buggy program passes all tests")]
    NoFailingTest,
    #[error("fault localization: {0}")]
    Localization(#[from] FlError),
}

struct Scheduled {
    key: ScheduleKey,
    pattern_id: &'static str,
    action: Action,
    location: StmtId,
    line: usize,
    suspiciousness: f64,
    patch: Patch,
    files: Vec<SourceFile>,
    checked: CheckedProgram,
}

/// Statements tracked by coverage in the program's source files, with
/// their start offsets.
pub fn statement_universe(checked: &CheckedProgram, source_files: &[usize]) -> Vec<(StmtId, usize)> {
    let mut out = Vec::new();
    for &i in source_files {
        let ast = &checked.asts[i];
        for id in tracked_statements(ast) {
            let start = ast.find(id).map_or(0, |n| n.span.start);
            out.push((StmtId { file: checked.paths[i].clone(), node: id }, start));
        }
    }
    out
}

fn first_error(errors: &[crate::lang::TypeError]) -> String {
    errors.first().map(|e| e.to_string()).unwrap_or_default()
}

/// Try to repair `bug`.
pub fn run_repair(bug: &BugCase, config: &RepairConfig) -> Result<RepairOutcome, RepairError> {
    let started = Instant::now();
    let out_of_time = || config.budget.is_some_and(|b| started.elapsed() >= b);
    let checked = check_program(&bug.sources).map_err(|e| RepairError::IllTyped(first_error(&e)))?;
    let fixed = check_program(&bug.fixed).map_err(|e| RepairError::IllTypedFix(first_error(&e)))?;
    let baseline = run_suite_file(&checked, bug.suite_index, &config.run);
    if baseline.failing() == 0 {
        return Err(RepairError::NoFailingTest);
    }
    let src_files = bug.source_indices();
    let universe = statement_universe(&checked, &src_files);
    let ranked = rank(&build_spectrum(&baseline.traces, &universe)?);
    let fl_position = position_of(&ranked, &bug.buggy_stmts);
    let suspicious: Vec<Suspicious> = match config.mode {
        FlMode::Perfect => {
            let located: Vec<(StmtId, usize)> =
                universe.iter().filter(|(id, _)| bug.buggy_stmts.contains(id)).cloned().collect();
            perfect_localization(&located)?
        }
        FlMode::Normal => ranked.into_iter().take(config.max_suspicious).collect(),
    };

    let mut outcome = RepairOutcome {
        bug_id: bug.id.clone(),
        expected_pattern: bug.expected_pattern.clone(),
        status: RepairStatus::Unfixed,
        plausible_patch: None,
        plausible_patches: Vec::new(),
        partial_patches: Vec::new(),
        correct: false,
        candidates_generated: 0,
        candidates_validated: 0,
        fl_position,
        suspicious_statements: suspicious.len(),
        wall_time: Duration::ZERO,
        validations: Vec::new(),
    };
    let mut seen_texts: HashSet<(usize, String)> = HashSet::new();
    let mut sequence_no = 0u64;
    let original_text: Vec<String> = checked.asts.iter().map(pretty_print).collect();

    'locations: for (location_rank, s) in suspicious.iter().enumerate() {
        if out_of_time() {
            break;
        }
        let Some(file) = checked.file_index(&s.stmt.file) else { continue };
        let Some(site) = Site::new(&checked, file, s.stmt.node) else { continue };
        let line = bug.sources[file].line_of(site.stmt.span);
        let matches = match_statement(&site, &config.patterns);
        let mut donors: Option<DonorSet> = None;
        let mut batch: Vec<Scheduled> = Vec::new();
        for m in &matches {
            if out_of_time() {
                break 'locations;
            }
            let donors = donors.get_or_insert_with(|| collect_donors(&checked, file, s.stmt.node, config.metric));
            let generated = match apply_pattern(&site, m, donors) {
                Ok(g) => g,
                Err(e) => {
                    log::trace!("{} at {}: {e}", m.descriptor.id, s.stmt);
                    continue;
                }
            };
            let realization = realize(&bug.sources, &checked, file, m.descriptor.id, generated, config.cap);
            outcome.candidates_generated += realization.tried;
            for r in realization.kept {
                batch.push(Scheduled {
                    key: ScheduleKey {
                        location_rank,
                        node_order: m.node_order,
                        action: m.descriptor.action,
                        pattern_index: pattern_index(m.descriptor.id).unwrap_or(usize::MAX),
                        donor_distance: r.generated.donor_distance,
                        donor_pos: r.generated.donor_pos,
                        gen_index: r.gen_index,
                    },
                    pattern_id: m.descriptor.id,
                    action: m.descriptor.action,
                    location: s.stmt.clone(),
                    line,
                    suspiciousness: s.score,
                    patch: r.patch,
                    files: r.files,
                    checked: r.checked,
                });
            }
        }
        schedule(&mut batch, |c| c.key);
        for c in batch {
            if out_of_time() {
                break 'locations;
            }
            sequence_no += 1;
            if !seen_texts.insert((file, c.files[file].text.clone())) {
                continue;
            }
            let result = run_suite_file(&c.checked, bug.suite_index, &config.run);
            let verdict = classify(&baseline, &result);
            outcome.candidates_validated += 1;
            outcome.validations.push((sequence_no, verdict));
            if verdict == PatchVerdict::Broken {
                continue;
            }
            let correct = src_files.iter().all(|&i| normalize_equal(&c.checked.asts[i], &fixed.asts[i]));
            let diff = file_diff(&c.patch.file, &original_text[file], &c.files[file].text);
            let report = PatchReport {
                sequence_no,
                pattern_id: c.pattern_id.to_string(),
                action: c.action,
                location: c.location.clone(),
                line: c.line,
                suspiciousness: c.suspiciousness,
                donor_distance: c.patch.donor_distance,
                verdict,
                correct,
                diff,
            };
            match verdict {
                PatchVerdict::Plausible => {
                    if outcome.plausible_patch.is_none() {
                        outcome.plausible_patch = Some(report.clone());
                        outcome.correct = correct;
                        outcome.status = RepairStatus::FullyFixed;
                    }
                    outcome.plausible_patches.push(report);
                    if !config.exhaustive {
                        break 'locations;
                    }
                }
                PatchVerdict::Partial => {
                    if !outcome.partial_patches.iter().any(|p| p.location == report.location) {
                        outcome.partial_patches.push(report);
                    }
                }
                PatchVerdict::Broken => {}
            }
        }
    }
    if outcome.status == RepairStatus::Unfixed && !outcome.partial_patches.is_empty() {
        outcome.status = RepairStatus::PartiallyFixed;
    }
    outcome.wall_time = started.elapsed();
    Ok(outcome)
}
