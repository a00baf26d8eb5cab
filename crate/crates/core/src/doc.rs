//! Plain-text bpa documents.
//!
//! ```text
//! # anything after a hash is a comment
//! frame: a b c d e
//! mass 0.5 set a,b
//! mass 0.3 set a,c,d
//! mass 0.2 set c
//! ```
//!
//! The `frame:` line comes first and lists the elements in order; each `mass`
//! line assigns one focal element. Duplicate sets accumulate. Formatting a
//! parsed bpa reproduces it exactly (masses print in shortest round-trip
//! form), with focal elements in ascending bit-pattern order.

use std::collections::HashSet;

use thiserror::Error;

use crate::bpa::Bpa;
use crate::error::EvidenceError;
use crate::frame::Frame;
use crate::set::FocalSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocError {
    /// Malformed text; positions are 1-based.
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed text describing an invalid bpa (bad mass sum, ...).
    #[error(transparent)]
    Invalid(#[from] EvidenceError),
}

struct Token<'a> {
    column: usize,
    byte: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    let mut byte = 0;
    for ch in line.chars() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((column, start)) = start.take() {
                out.push(Token {
                    column,
                    byte: start,
                    text: &line[start..byte],
                });
            }
        } else if start.is_none() {
            start = Some((column, byte));
        }
        byte += ch.len_utf8();
    }
    if let Some((column, start)) = start {
        out.push(Token {
            column,
            byte: start,
            text: &line[start..],
        });
    }
    out
}

fn column_at(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

fn end_column(line: &str) -> usize {
    line.chars().count() + 1
}

/// Parses a bpa document. Syntax problems carry line/column positions;
/// semantic problems (mass sum, negative mass) surface as the underlying
/// [`EvidenceError`].
pub fn parse_bpa(text: &str) -> Result<Bpa, DocError> {
    let mut frame: Option<Frame> = None;
    let mut assignments: Vec<(FocalSet, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        let syntax = |column: usize, message: String| DocError::Syntax {
            line: line_no,
            column,
            message,
        };

        let head = &tokens[0];
        if frame.is_none() {
            if head.text != "frame:" {
                return Err(syntax(head.column, "expected `frame:` declaration".into()));
            }
            let mut seen = HashSet::new();
            for token in &tokens[1..] {
                if token.text.contains(',') {
                    return Err(syntax(
                        token.column,
                        "frame elements are separated by spaces, not commas".into(),
                    ));
                }
                if !seen.insert(token.text) {
                    return Err(syntax(
                        token.column,
                        format!("duplicate frame element `{}`", token.text),
                    ));
                }
            }
            let labels = tokens[1..].iter().map(|t| t.text);
            frame = Some(Frame::new(labels).map_err(|e| syntax(head.column, e.to_string()))?);
            continue;
        }

        if head.text == "frame:" {
            return Err(syntax(head.column, "duplicate `frame:` declaration".into()));
        }
        if head.text != "mass" {
            return Err(syntax(
                head.column,
                format!("expected `mass`, got `{}`", head.text),
            ));
        }
        let Some(mass_token) = tokens.get(1) else {
            return Err(syntax(
                end_column(line),
                "expected a mass value after `mass`".into(),
            ));
        };
        let mass: f64 = mass_token
            .text
            .parse()
            .ok()
            .filter(|m: &f64| m.is_finite())
            .ok_or_else(|| {
                syntax(
                    mass_token.column,
                    format!("invalid mass `{}`", mass_token.text),
                )
            })?;
        let Some(set_token) = tokens.get(2) else {
            return Err(syntax(end_column(line), "expected `set`".into()));
        };
        if set_token.text != "set" {
            return Err(syntax(
                set_token.column,
                format!("expected `set`, got `{}`", set_token.text),
            ));
        }

        let frame = frame.as_ref().expect("frame parsed above");
        let tail_start = set_token.byte + set_token.text.len();
        if line[tail_start..].trim().is_empty() {
            return Err(syntax(
                end_column(line),
                "expected at least one element after `set`".into(),
            ));
        }
        let mut bits = 0u64;
        let mut pos = tail_start;
        loop {
            let end = line[pos..].find(',').map(|i| pos + i).unwrap_or(line.len());
            let raw = &line[pos..end];
            let element_start = pos + (raw.len() - raw.trim_start().len());
            let element = raw.trim();
            if element.is_empty() {
                return Err(syntax(
                    column_at(line, element_start),
                    "empty element in set list".into(),
                ));
            }
            if element.chars().any(char::is_whitespace) {
                return Err(syntax(
                    column_at(line, element_start),
                    format!("element `{element}` contains whitespace (missing comma?)"),
                ));
            }
            let index = frame.index_of(element).ok_or_else(|| {
                syntax(
                    column_at(line, element_start),
                    format!("unknown element `{element}`"),
                )
            })?;
            bits |= 1 << index;
            if end == line.len() {
                break;
            }
            pos = end + 1;
        }
        assignments.push((FocalSet::from_bits(bits), mass));
    }

    let Some(frame) = frame else {
        return Err(DocError::Syntax {
            line: 1,
            column: 1,
            message: "document has no `frame:` declaration".into(),
        });
    };
    Ok(Bpa::new(frame, assignments)?)
}

/// Renders a bpa in the document format; `parse_bpa` reproduces it exactly.
pub fn format_bpa(m: &Bpa) -> String {
    let frame = m.frame();
    let mut out = format!("frame: {}\n", frame.labels().join(" "));
    for (set, mass) in m.iter() {
        out.push_str("mass ");
        out.push_str(&mass.to_string());
        out.push_str(" set ");
        out.push_str(&frame.labels_of(set).join(","));
        out.push('\n');
    }
    out
}
