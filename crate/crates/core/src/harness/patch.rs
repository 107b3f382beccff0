//! Multi-file unified diffs.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error("no file sections")]
    Empty,
    #[error("malformed section for {0}: {1}")]
    Malformed(String, String),
    #[error("patch touches unknown file {0}")]
    UnknownFile(String),
    #[error("hunks do not apply to {0}")]
    Conflict(String),
}

fn strip_prefix(name: &str) -> &str {
    let name = name.split('\t').next().unwrap_or(name).trim();
    name.strip_prefix("a/").or_else(|| name.strip_prefix("b/")).unwrap_or(name)
}

/// Split a multi-file unified diff into `(path, single-file diff)` pairs.
pub fn split_patch(text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut lines = text.split_inclusive('\n').peekable();
    while let Some(line) = lines.next() {
        let starts_section = line.starts_with("--- ") && lines.peek().is_some_and(|n| n.starts_with("+++ "));
        if starts_section {
            let plus = lines.next().unwrap_or_default();
            let path = strip_prefix(&plus[4..]).to_string();
            out.push((path, format!("{line}{plus}")));
        } else if let Some((_, body)) = out.last_mut() {
            body.push_str(line);
        }
    }
    out
}

/// Apply a multi-file unified diff to `(path, text)` files; untouched files
/// are returned unchanged.
pub fn apply_patch(files: &[(String, String)], patch: &str) -> Result<Vec<(String, String)>, PatchError> {
    let sections = split_patch(patch);
    if sections.is_empty() {
        return Err(PatchError::Empty);
    }
    let mut out = files.to_vec();
    for (path, body) in sections {
        let entry = out.iter_mut().find(|(p, _)| *p == path).ok_or_else(|| PatchError::UnknownFile(path.clone()))?;
        let parsed = diffy::Patch::from_str(&body).map_err(|e| PatchError::Malformed(path.clone(), e.to_string()))?;
        entry.1 = diffy::apply(&entry.1, &parsed).map_err(|_| PatchError::Conflict(path.clone()))?;
    }
    Ok(out)
}

/// Unified diff of one file with `a/` and `b/` prefixed names.
pub fn file_diff(path: &str, before: &str, after: &str) -> String {
    diffy::DiffOptions::new()
        .set_original_filename(format!("a/{path}"))
        .set_modified_filename(format!("b/{path}"))
        .create_patch(before, after)
        .to_string()
}
