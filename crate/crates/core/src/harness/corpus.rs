//! On-disk bug corpus.
//!
//! ```text
//! <root>/<bug-id>/bug.toml
//! <root>/<bug-id>/src/*.mj
//! <root>/<bug-id>/tests/suite.mj
//! <root>/<bug-id>/fix.patch
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::driver::{run_suite_file, SuiteResult};
use crate::lang::check::check_program;
use crate::lang::interp::RunConfig;
use crate::lang::{line_col, tracked_statements, SourceFile, StmtId};

use super::patch::{apply_patch, PatchError};

pub const SUITE_PATH: &str = "tests/suite.mj";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BugToml {
    id: String,
    buggy_files: Vec<String>,
    buggy_lines: Vec<(String, usize)>,
    expected_pattern: Option<String>,
}

/// One bug: buggy program, test suite and ground truth.
#[derive(Clone, Debug)]
pub struct BugCase {
    pub id: String,
    pub dir: PathBuf,
    /// Source files followed by the suite file.
    pub sources: Vec<SourceFile>,
    pub suite_index: usize,
    /// `sources` with the ground-truth patch applied.
    pub fixed: Vec<SourceFile>,
    pub buggy_files: Vec<String>,
    pub buggy_lines: Vec<(String, usize)>,
    pub buggy_stmts: Vec<StmtId>,
    pub expected_pattern: Option<String>,
}

impl BugCase {
    /// Indices of the non-suite files.
    pub fn source_indices(&self) -> Vec<usize> {
        (0..self.sources.len()).filter(|&i| i != self.suite_index).collect()
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{bug}: {message}")]
    Layout { bug: String, message: String },
    #[error("{bug}: {message}")]
    Source { bug: String, message: String },
    #[error("{bug}: ground-truth patch: {source}")]
    Patch { bug: String, source: PatchError },
    #[error("{bug}: buggy program passes every test")]
    NotReproducing { bug: String },
    #[error("{bug}: ground truth leaves failing tests: {tests}")]
    NotFixing { bug: String, tests: String },
    #[error("{bug}: line {line} of {file} holds no statement")]
    NoStatement { bug: String, file: String, line: usize },
}

impl CorpusError {
    pub fn bug(&self) -> &str {
        match self {
            CorpusError::Layout { bug, .. }
            | CorpusError::Source { bug, .. }
            | CorpusError::Patch { bug, .. }
            | CorpusError::NotReproducing { bug }
            | CorpusError::NotFixing { bug, .. }
            | CorpusError::NoStatement { bug, .. } => bug,
        }
    }
}

fn layout(bug: &str, message: impl Into<String>) -> CorpusError {
    CorpusError::Layout { bug: bug.to_string(), message: message.into() }
}

/// Load every bug directory under `root`, sorted by directory name.
pub fn load_corpus(root: &Path, run: &RunConfig) -> Result<Vec<BugCase>, CorpusError> {
    let entries = fs::read_dir(root).map_err(|e| layout(&root.display().to_string(), e.to_string()))?;
    let mut dirs: Vec<PathBuf> =
        entries.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.join("bug.toml").is_file()).collect();
    dirs.sort();
    dirs.iter().map(|d| load_bug(d, run)).collect()
}

/// Load one bug directory and verify that the bug reproduces and the
/// ground truth fixes it.
pub fn load_bug(dir: &Path, run: &RunConfig) -> Result<BugCase, CorpusError> {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let manifest = fs::read_to_string(dir.join("bug.toml")).map_err(|e| layout(&name, format!("bug.toml: {e}")))?;
    let toml: BugToml = toml::from_str(&manifest).map_err(|e| layout(&name, format!("bug.toml: {e}")))?;
    let id = toml.id;

    let mut src_paths: Vec<String> = fs::read_dir(dir.join("src"))
        .map_err(|e| layout(&id, format!("src/: {e}")))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".mj"))
        .map(|n| format!("src/{n}"))
        .collect();
    src_paths.sort();
    if src_paths.is_empty() {
        return Err(layout(&id, "no src/*.mj files"));
    }
    for f in toml.buggy_files.iter().chain(toml.buggy_lines.iter().map(|(f, _)| f)) {
        if !src_paths.contains(f) {
            return Err(layout(&id, format!("{f} is not a source file")));
        }
    }
    let mut texts = Vec::new();
    for p in src_paths.iter().map(String::as_str).chain([SUITE_PATH]) {
        let text = fs::read_to_string(dir.join(p)).map_err(|e| layout(&id, format!("{p}: {e}")))?;
        texts.push((p.to_string(), text));
    }
    let fix = fs::read_to_string(dir.join("fix.patch")).map_err(|e| layout(&id, format!("fix.patch: {e}")))?;
    let fixed_texts = apply_patch(&texts, &fix).map_err(|source| CorpusError::Patch { bug: id.clone(), source })?;

    let parse_all = |texts: &[(String, String)]| -> Result<Vec<SourceFile>, CorpusError> {
        texts
            .iter()
            .map(|(p, t)| {
                SourceFile::parse(p.clone(), t.clone())
                    .map_err(|e| CorpusError::Source { bug: id.clone(), message: format!("{p}: {e}") })
            })
            .collect()
    };
    let sources = parse_all(&texts)?;
    let fixed = parse_all(&fixed_texts)?;
    let suite_index = sources.len() - 1;

    let mut buggy_stmts = Vec::new();
    for (file, line) in &toml.buggy_lines {
        let f = sources.iter().find(|s| &s.path == file).expect("checked above");
        let stmt = statement_on_line(f, *line)
            .ok_or_else(|| CorpusError::NoStatement { bug: id.clone(), file: file.clone(), line: *line })?;
        if !buggy_stmts.contains(&stmt) {
            buggy_stmts.push(stmt);
        }
    }

    let bug = BugCase {
        id,
        dir: dir.to_path_buf(),
        sources,
        suite_index,
        fixed,
        buggy_files: toml.buggy_files,
        buggy_lines: toml.buggy_lines,
        buggy_stmts,
        expected_pattern: toml.expected_pattern,
    };
    verify(&bug, run)?;
    Ok(bug)
}

fn suite_result(bug: &BugCase, files: &[SourceFile], run: &RunConfig) -> Result<SuiteResult, CorpusError> {
    let checked = check_program(files).map_err(|errs| CorpusError::Source {
        bug: bug.id.clone(),
        message: errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
    })?;
    Ok(run_suite_file(&checked, bug.suite_index, run))
}

/// Check that the buggy program fails a test and the fixed one passes all.
pub fn verify(bug: &BugCase, run: &RunConfig) -> Result<(), CorpusError> {
    if suite_result(bug, &bug.sources, run)?.failing() == 0 {
        return Err(CorpusError::NotReproducing { bug: bug.id.clone() });
    }
    let fixed = suite_result(bug, &bug.fixed, run)?;
    let failing: Vec<&str> =
        fixed.traces.iter().filter(|t| !t.verdict.is_pass()).map(|t| t.test.as_str()).collect();
    if !failing.is_empty() {
        return Err(CorpusError::NotFixing { bug: bug.id.clone(), tests: failing.join(", ") });
    }
    Ok(())
}

/// The outermost tracked statement starting on `line`.
pub fn statement_on_line(file: &SourceFile, line: usize) -> Option<StmtId> {
    tracked_statements(&file.ast)
        .into_iter()
        .find(|&id| file.ast.find(id).is_some_and(|n| line_col(&file.text, n.span.start).0 == line))
        .map(|node| StmtId { file: file.path.clone(), node })
}
