//! Text formats for digraphs and operation tables.
//!
//! Digraph format (`.dg`): comment lines start with `#`; the first content
//! line is `n <count>`; each following line is one arc `<u> <v>` (0-based).
//! Loops are implied and the writer omits them, emitting arcs sorted
//! lexicographically.
//!
//! Operation format (`.op`): `n <base>`, `k <arity>`, then `base^arity`
//! whitespace-separated values in mixed-radix tuple order.

use crate::digraph::{Digraph, DigraphError};
use crate::poly::{OperationTable, PolyError};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Operation(#[from] PolyError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Content lines with their 1-based line numbers, comments and blanks
/// stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_digraph(text: &str) -> Result<Digraph, FormatError> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| syntax(0, "missing `n <count>` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("n") {
        return Err(syntax(line_no, "expected `n <count>` header"));
    }
    let n: usize = parts
        .next()
        .ok_or_else(|| syntax(line_no, "missing vertex count"))?
        .parse()
        .map_err(|_| syntax(line_no, "vertex count is not a number"))?;
    if parts.next().is_some() {
        return Err(syntax(line_no, "trailing tokens after vertex count"));
    }
    if n == 0 {
        return Err(syntax(line_no, "vertex count must be positive"));
    }
    let mut arcs = Vec::new();
    for (line_no, line) in lines {
        let mut parts = line.split_whitespace();
        let u: usize = parts
            .next()
            .unwrap()
            .parse()
            .map_err(|_| syntax(line_no, "arc endpoint is not a number"))?;
        let v: usize = parts
            .next()
            .ok_or_else(|| syntax(line_no, "arc needs two endpoints"))?
            .parse()
            .map_err(|_| syntax(line_no, "arc endpoint is not a number"))?;
        if parts.next().is_some() {
            return Err(syntax(line_no, "trailing tokens after arc"));
        }
        if u >= n || v >= n {
            return Err(syntax(
                line_no,
                format!("arc ({u}, {v}) out of range for {n} vertices"),
            ));
        }
        arcs.push((u, v));
    }
    Ok(Digraph::new(n, &arcs)?)
}

pub fn digraph_to_string(g: &Digraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v) in g.non_loop_arcs() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_digraph(path: impl AsRef<Path>) -> Result<Digraph, FormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_digraph(&text)
}

pub fn write_digraph(g: &Digraph, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    std::fs::write(path, digraph_to_string(g)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_op(text: &str) -> Result<OperationTable, FormatError> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| syntax(0, "missing `n <base>` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("n") {
        return Err(syntax(line_no, "expected `n <base>` header"));
    }
    let base: usize = parts
        .next()
        .ok_or_else(|| syntax(line_no, "missing base"))?
        .parse()
        .map_err(|_| syntax(line_no, "base is not a number"))?;
    if base == 0 {
        return Err(syntax(line_no, "base must be positive"));
    }
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| syntax(line_no, "missing `k <arity>` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("k") {
        return Err(syntax(line_no, "expected `k <arity>` header"));
    }
    let arity: usize = parts
        .next()
        .ok_or_else(|| syntax(line_no, "missing arity"))?
        .parse()
        .map_err(|_| syntax(line_no, "arity is not a number"))?;
    let expected = base
        .checked_pow(arity as u32)
        .ok_or_else(|| syntax(line_no, "table too large"))?;
    let mut values = Vec::with_capacity(expected);
    let mut last_line = line_no;
    for (line_no, line) in lines {
        last_line = line_no;
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| syntax(line_no, format!("value {tok:?} is not a number")))?;
            if v >= base {
                return Err(syntax(
                    line_no,
                    format!("value {v} out of range for base {base}"),
                ));
            }
            values.push(v);
            if values.len() > expected {
                return Err(syntax(line_no, "more values than the table holds"));
            }
        }
    }
    if values.len() != expected {
        return Err(syntax(
            last_line,
            format!("expected {expected} values, got {}", values.len()),
        ));
    }
    Ok(OperationTable::new(base, arity, values)?)
}

pub fn op_to_string(f: &OperationTable) -> String {
    let mut out = format!("n {}\nk {}\n", f.base(), f.arity());
    for chunk in f.values().chunks(f.base()) {
        let row: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_op(path: impl AsRef<Path>) -> Result<OperationTable, FormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_op(&text)
}

pub fn write_op(f: &OperationTable, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    std::fs::write(path, op_to_string(f)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
