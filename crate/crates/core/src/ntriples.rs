//! Line-oriented N-Triples serialization.
//!
//! One triple per line, `<s> <p> <o> .`, literal objects quoted with
//! backslash escapes. Documents are written with their lines sorted
//! lexicographically so repeated runs are byte-identical.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{Triple, TripleObject, Uri};

/// Render one triple as a single N-Triples line (without trailing newline).
pub fn triple_line(t: &Triple) -> String {
    match &t.object {
        TripleObject::Uri(o) => format!("<{}> <{}> <{}> .", t.subject, t.predicate, o),
        TripleObject::Literal(l) => {
            format!("<{}> <{}> \"{}\" .", t.subject, t.predicate, escape_literal(l))
        }
    }
}

/// Render a whole document with lines sorted lexicographically.
pub fn to_document(triples: &[Triple]) -> String {
    let mut lines: Vec<String> = triples.iter().map(triple_line).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_document<W: Write>(triples: &[Triple], mut w: W) -> std::io::Result<()> {
    w.write_all(to_document(triples).as_bytes())
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

/// Parse a full document; blank lines and `#` comment lines are skipped.
pub fn parse_document(input: &str) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        triples.push(parse_line(trimmed).map_err(|e| at_line(e, idx as u64 + 1))?);
    }
    Ok(triples)
}

/// Parse one `<s> <p> <o> .` line.
pub fn parse_line(line: &str) -> Result<Triple> {
    let mut rest = line.trim();
    let subject = take_uri(&mut rest)?;
    let predicate = take_uri(&mut rest)?;
    rest = rest.trim_start();
    let object = if rest.starts_with('<') {
        TripleObject::Uri(take_uri(&mut rest)?)
    } else if rest.starts_with('"') {
        TripleObject::Literal(take_literal(&mut rest)?)
    } else {
        return Err(parse_err(format!(
            "expected <uri> or \"literal\" object, found {rest:?}"
        )));
    };
    let rest = rest.trim_start();
    if rest != "." {
        return Err(parse_err(format!("expected terminating '.', found {rest:?}")));
    }
    Ok(Triple {
        subject,
        predicate,
        object,
    })
}

fn take_uri(rest: &mut &str) -> Result<Uri> {
    let s = rest.trim_start();
    if !s.starts_with('<') {
        return Err(parse_err(format!("expected '<', found {s:?}")));
    }
    let end = s
        .find('>')
        .ok_or_else(|| parse_err("unterminated URI: missing '>'".to_string()))?;
    let uri = Uri::new(&s[1..end]).map_err(|e| parse_err(e.to_string()))?;
    *rest = &s[end + 1..];
    Ok(uri)
}

fn take_literal(rest: &mut &str) -> Result<String> {
    let s = rest.trim_start();
    debug_assert!(s.starts_with('"'));
    let mut out = String::new();
    let mut chars = s[1..].char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => {
                *rest = &s[1 + i + 1..];
                return Ok(out);
            }
            '\\' => {
                let (_, esc) = chars
                    .next()
                    .ok_or_else(|| parse_err("truncated escape sequence".to_string()))?;
                match esc {
                    '\\' => out.push('\\'),
                    '"' => out.push('"'),
                    'n' => out.push('\n'),
                    'r' => out.push('\r'),
                    't' => out.push('\t'),
                    'u' | 'U' => {
                        let len = if esc == 'u' { 4 } else { 8 };
                        let mut code = 0u32;
                        for _ in 0..len {
                            let (_, h) = chars.next().ok_or_else(|| {
                                parse_err("truncated \\u escape".to_string())
                            })?;
                            let digit = h.to_digit(16).ok_or_else(|| {
                                parse_err(format!("invalid hex digit {h:?} in \\u escape"))
                            })?;
                            code = code * 16 + digit;
                        }
                        let ch = char::from_u32(code).ok_or_else(|| {
                            parse_err(format!("invalid code point U+{code:04X}"))
                        })?;
                        out.push(ch);
                    }
                    other => {
                        return Err(parse_err(format!("unknown escape sequence \\{other}")));
                    }
                }
            }
            other => out.push(other),
        }
    }
    Err(parse_err("unterminated literal: missing '\"'".to_string()))
}

fn parse_err(message: String) -> Error {
    Error::Parse {
        path: None,
        line: 0,
        column: 0,
        message,
    }
}

fn at_line(e: Error, line: u64) -> Error {
    match e {
        Error::Parse {
            path,
            column,
            message,
            ..
        } => Error::Parse {
            path,
            line,
            column,
            message,
        },
        other => other,
    }
}
