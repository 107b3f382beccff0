//! The MiniJ reference language: a single-inheritance Java subset with
//! classes, fields, overloaded methods, `try`/`catch`, casts, `instanceof`,
//! arrays and strings.

pub mod check;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod types;

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::ast::{Node, NodeId, Span};

pub use check::{type_check, TypeError};
pub use interp::{run_tests, CoverageTrace, TestCase, Verdict};
pub use parser::parse;
pub use printer::pretty_print;
pub use types::{ClassTable, LangType};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn at(text: &str, offset: usize, message: &str) -> Self {
        let (line, column) = line_col(text, offset);
        SyntaxError { line, column, offset, message: message.to_string() }
    }

    pub(crate) fn unsupported(text: &str, offset: usize, what: &str) -> Self {
        Self::at(text, offset, &format!("unsupported construct `{what}`"))
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// A parsed source file of the program under repair.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
    pub ast: Node,
}

impl SourceFile {
    pub fn parse(path: impl Into<String>, text: impl Into<String>) -> Result<Self, SyntaxError> {
        let text = text.into();
        let ast = parse(&text)?;
        Ok(SourceFile { path: path.into(), text, ast })
    }

    pub fn load(path: &Path, display_path: impl Into<String>) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(path.display().to_string(), e.to_string()))?;
        let display = display_path.into();
        SourceFile::parse(display.clone(), text).map_err(|e| LoadError::Syntax(display, e))
    }

    /// 1-based line on which a span starts.
    pub fn line_of(&self, span: Span) -> usize {
        line_col(&self.text, span.start).0
    }

    /// Replace the AST by re-parsing its printed form; text follows the AST.
    pub fn reprinted(path: impl Into<String>, ast: &Node) -> Result<Self, SyntaxError> {
        SourceFile::parse(path, pretty_print(ast))
    }
}

#[derive(Clone, Debug, Error)]
pub enum LoadError {
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("{0}:{1}")]
    Syntax(String, SyntaxError),
}

/// Identifies one statement: file path plus the statement's preorder index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct StmtId {
    pub file: String,
    pub node: NodeId,
}

impl fmt::Display for StmtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.file, self.node)
    }
}

/// Program = source files under repair plus the test-suite file.
#[derive(Clone, Debug)]
pub struct Program {
    pub files: Vec<SourceFile>,
}

impl Program {
    pub fn new(files: Vec<SourceFile>) -> Self {
        Program { files }
    }

    pub fn file_index(&self, path: &str) -> Option<usize> {
        self.files.iter().position(|f| f.path == path)
    }

    pub fn file(&self, path: &str) -> Option<&SourceFile> {
        self.files.iter().find(|f| f.path == path)
    }

    pub fn statement(&self, id: &StmtId) -> Option<&Node> {
        self.file(&id.file)?.ast.find(id.node)
    }
}

/// Whether `node` (with parent `parent`) is a statement that coverage and
/// fault localization track. Blocks, empty statements and the header parts
/// of a `for` loop are not tracked separately.
pub fn is_tracked_statement(node: &Node, parent: Option<&Node>) -> bool {
    use crate::ast::Kind;
    if !node.is_statement() || matches!(node.kind, Kind::Block | Kind::Empty) {
        return false;
    }
    match parent {
        Some(p) if p.kind == Kind::For => p.children.last().map(|b| b.id) == Some(node.id),
        _ => true,
    }
}

/// Ids of all tracked statements of a file in preorder.
pub fn tracked_statements(ast: &Node) -> Vec<NodeId> {
    fn go(n: &Node, parent: Option<&Node>, out: &mut Vec<NodeId>) {
        if is_tracked_statement(n, parent) {
            out.push(n.id);
        }
        for c in &n.children {
            go(c, Some(n), out);
        }
    }
    let mut out = Vec::new();
    go(ast, None, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        let t = "ab\ncd\n";
        assert_eq!(line_col(t, 0), (1, 1));
        assert_eq!(line_col(t, 4), (2, 2));
    }
}
