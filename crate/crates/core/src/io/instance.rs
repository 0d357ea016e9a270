//! MQlib-style triplet files.
//!
//! ```text
//! # comments and blank lines are ignored anywhere
//! n m
//! i j w      (m data lines, 1-based indices)
//! ```
//!
//! `qubo` files require `i ≤ j` and map each line to the entry
//! `(i−1, j−1)`. `maxcut` files require `i ≠ j` and describe weighted
//! edges, which are reduced to a QUBO via [`from_maxcut`].

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maxcut::{from_maxcut, MaxCutGraph};
use crate::qubo::{QuboInstance, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InstanceFormat {
    #[default]
    #[serde(alias = "qubo_triplets")]
    Qubo,
    #[serde(alias = "maxcut_triplets")]
    Maxcut,
}

impl FromStr for InstanceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qubo" | "qubo_triplets" => Ok(InstanceFormat::Qubo),
            "maxcut" | "max-cut" | "maxcut_triplets" => Ok(InstanceFormat::Maxcut),
            other => Err(format!("unknown instance format '{other}' (expected qubo or maxcut)")),
        }
    }
}

/// A parse failure, located by 1-based line number.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

/// Parses an instance from any buffered reader.
pub fn parse_instance<R: BufRead>(reader: R, format: InstanceFormat) -> Result<QuboInstance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut last_line = 0;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|e| ParseError::new(lineno, format!("read failed: {e}")))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();

        let Some((n, m)) = header else {
            if fields.len() != 2 {
                return Err(ParseError::new(lineno, format!("malformed header '{text}', expected 'n m'")));
            }
            let n = parse_count(fields[0], lineno, "variable count")?;
            let m = parse_count(fields[1], lineno, "entry count")?;
            if n == 0 {
                return Err(ParseError::new(lineno, "malformed header: variable count must be positive"));
            }
            header = Some((n, m));
            triples.reserve(m.min(1 << 24));
            continue;
        };

        if triples.len() == m {
            return Err(ParseError::new(
                lineno,
                format!("declared {m} entries, found more (unexpected data line '{text}')"),
            ));
        }
        if fields.len() != 3 {
            return Err(ParseError::new(lineno, format!("expected 'i j w', found '{text}'")));
        }
        let i = parse_index(fields[0], n, lineno)?;
        let j = parse_index(fields[1], n, lineno)?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| ParseError::new(lineno, format!("invalid weight '{}'", fields[2])))?;
        if !w.is_finite() {
            return Err(ParseError::new(lineno, format!("non-finite weight '{}'", fields[2])));
        }
        match format {
            InstanceFormat::Qubo if i > j => {
                return Err(ParseError::new(lineno, format!("qubo entries need i <= j, found {} {}", i + 1, j + 1)));
            }
            InstanceFormat::Maxcut if i == j => {
                return Err(ParseError::new(lineno, format!("self-loop on vertex {}", i + 1)));
            }
            _ => {}
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(ParseError::new(lineno, format!("duplicate pair {} {}", key.0 + 1, key.1 + 1)));
        }
        triples.push((i, j, w));
    }

    let Some((n, m)) = header else {
        return Err(ParseError::new(last_line.max(1), "malformed header: file has no 'n m' line"));
    };
    if triples.len() != m {
        return Err(ParseError::new(
            last_line.max(1),
            format!("declared {m} entries, found {}", triples.len()),
        ));
    }

    let q = match format {
        InstanceFormat::Qubo => QuboInstance::from_entries(n, triples, Sense::Minimize),
        InstanceFormat::Maxcut => MaxCutGraph::new(n, triples).map(|g| from_maxcut(&g)),
    };
    q.map_err(|e| ParseError::new(last_line.max(1), e.to_string()))
}

pub fn parse_instance_str(text: &str, format: InstanceFormat) -> Result<QuboInstance, ParseError> {
    parse_instance(text.as_bytes(), format)
}

fn parse_count(field: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    field
        .parse()
        .map_err(|_| ParseError::new(line, format!("malformed header: invalid {what} '{field}'")))
}

fn parse_index(field: &str, n: usize, line: usize) -> Result<usize, ParseError> {
    let v: usize = field
        .parse()
        .map_err(|_| ParseError::new(line, format!("invalid index '{field}'")))?;
    if v == 0 || v > n {
        return Err(ParseError::new(line, format!("index {v} out of range [1, {n}]")));
    }
    Ok(v - 1)
}

/// Writes `q` in `qubo` triplet form, 1-based, entries in canonical order.
///
/// Weights use Rust's shortest round-trip float formatting, so parsing the
/// output reproduces the entry map exactly.
pub fn write_instance(q: &QuboInstance) -> String {
    let mut out = String::with_capacity(16 + q.num_nonzeros() * 24);
    let _ = writeln!(out, "{} {}", q.num_variables(), q.num_nonzeros());
    for e in q.entries() {
        let _ = writeln!(out, "{} {} {}", e.i + 1, e.j + 1, e.value);
    }
    out
}
