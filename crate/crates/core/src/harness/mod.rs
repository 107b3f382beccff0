//! Seeded-bug corpus, batch runs and reports.

mod corpus;
mod patch;
mod report;
mod suite;

pub use corpus::{load_bug, load_corpus, statement_on_line, verify, BugCase, CorpusError, SUITE_PATH};
pub use patch::{apply_patch, file_diff, split_patch, PatchError};
pub use report::{aggregate, render_table, Aggregates, BugRow, BugStatus, FixCounts, PatternRow, RunReport, RunSettings, SCHEMA_VERSION};
pub use suite::{repair_row, run_suite, settings_of};
