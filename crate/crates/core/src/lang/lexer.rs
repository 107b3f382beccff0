//! Tokenizer for MiniJ source text.

use crate::ast::Span;

use super::SyntaxError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Kw(&'static str),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Float(v) => format!("float `{v}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Kw(k) => format!("`{k}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub const KEYWORDS: &[&str] = &[
    "class",
    "extends",
    "if",
    "else",
    "while",
    "for",
    "return",
    "break",
    "continue",
    "try",
    "catch",
    "new",
    "this",
    "super",
    "null",
    "true",
    "false",
    "instanceof",
    "int",
    "float",
    "boolean",
    "void",
    "assert",
];

/// Longest match first.
const PUNCT: &[&str] = &[
    "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "++", "--", "(", ")", "{", "}", "[", "]", ";", ",",
    ".", "=", "+", "-", "*", "/", "%", "<", ">", "!", "?", ":",
];

/// Unsupported Java syntax that gets a dedicated diagnostic.
const UNSUPPORTED: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "interface",
    "throw",
    "throws",
    "finally",
    "switch",
    "do",
    "import",
    "package",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if text[i..].starts_with("/*") {
            match text[i + 2..].find("*/") {
                Some(end) => i += end + 4,
                None => return Err(SyntaxError::at(text, i, "unterminated block comment")),
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = if let Some(k) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Kw(k)
            } else if UNSUPPORTED.contains(&word) {
                return Err(SyntaxError::unsupported(text, start, word));
            } else {
                Tok::Ident(word.to_string())
            };
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_float = false;
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                is_float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme = &text[start..i];
            let tok = if is_float {
                Tok::Float(lexeme.parse().map_err(|_| SyntaxError::at(text, start, "malformed float literal"))?)
            } else {
                Tok::Int(lexeme.parse().map_err(|_| SyntaxError::at(text, start, "integer literal out of range"))?)
            };
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = text[i..].chars().next() else {
                    return Err(SyntaxError::at(text, start, "unterminated string literal"));
                };
                match ch {
                    '"' => {
                        i += 1;
                        break;
                    }
                    '\n' => return Err(SyntaxError::at(text, start, "unterminated string literal")),
                    '\\' => {
                        let esc = text[i + 1..].chars().next();
                        let decoded = match esc {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => return Err(SyntaxError::at(text, i, "invalid escape sequence")),
                        };
                        s.push(decoded);
                        i += 2;
                    }
                    other => {
                        s.push(other);
                        i += other.len_utf8();
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), span: Span::new(start, i) });
            continue;
        }
        match PUNCT.iter().find(|p| text[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                out.push(Token { tok: Tok::Punct(p), span: Span::new(start, i) });
            }
            None => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::at(text, i, &format!("unexpected character `{ch}`")));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(text.len(), text.len()) });
    Ok(out)
}
