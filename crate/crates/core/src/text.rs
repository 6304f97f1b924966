//! Line tokenizing shared by the state and netlist parsers.

use crate::error::{Error, Result};

/// A whitespace-separated token with its 1-based column.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub column: usize,
    pub text: &'a str,
}

/// Splits a line into tokens, dropping anything after `#`.
pub(crate) fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    column: content[..s].chars().count() + 1,
                    text: &content[s..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            column: content[..s].chars().count() + 1,
            text: &content[s..],
        });
    }
    tokens
}

pub(crate) fn is_valid_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn parse_label(line: usize, tok: Token<'_>) -> Result<&str> {
    if is_valid_label(tok.text) {
        Ok(tok.text)
    } else {
        Err(Error::parse(
            line,
            tok.column,
            format!("invalid mode label `{}`", tok.text),
        ))
    }
}

pub(crate) fn parse_f64(line: usize, tok: Token<'_>) -> Result<f64> {
    match tok.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(
            line,
            tok.column,
            format!("malformed number `{}`", tok.text),
        )),
    }
}

/// Column just past the end of the line, used for "missing argument" errors.
pub(crate) fn end_column(line: &str) -> usize {
    line.chars().count() + 1
}
