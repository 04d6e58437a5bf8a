//! Line-oriented workload scripts and their operation type.
//!
//! Grammar, one op per line, tokens separated by blanks or tabs:
//!
//! ```text
//! APPEND m v1 ... vm
//! GET k m
//! SET k m v1 ... vm
//! INSERT k m v1 ... vm
//! DELETE k m
//! ```
//!
//! Values are unquoted tokens without whitespace, kept as raw bytes. Lines
//! whose first non-blank byte is `#` are comments; blank lines are ignored.
//! The canonical form (single spaces) round-trips through parse byte for
//! byte.

use std::error::Error;
use std::fmt;

use crate::error::TreeError;
use crate::key::RankKey;
use crate::tree::WiseTree;

/// One block operation, as read from (or written to) a workload script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorkloadOp {
    Append { values: Vec<Vec<u8>> },
    Get { k: usize, m: usize },
    Set { k: usize, values: Vec<Vec<u8>> },
    Insert { k: usize, values: Vec<Vec<u8>> },
    Delete { k: usize, m: usize },
}

/// What an operation produced, shaped identically for the tree and the
/// array oracle so outcomes compare directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpOutcome {
    /// Mutation completed.
    Done,
    /// Payloads read out by a get.
    Values(Vec<Vec<u8>>),
    /// Key/payload pairs removed by a delete, in rank order.
    Removed(Vec<(RankKey, Vec<u8>)>),
}

/// Applies one workload op to the tree.
pub fn apply_to_tree(tree: &mut WiseTree, op: &WorkloadOp) -> Result<OpOutcome, TreeError> {
    match op {
        WorkloadOp::Append { values } => tree.block_append(values.clone()).map(|_| OpOutcome::Done),
        WorkloadOp::Get { k, m } => tree.block_get(*k, *m).map(OpOutcome::Values),
        WorkloadOp::Set { k, values } => {
            tree.block_set(*k, values.clone()).map(|_| OpOutcome::Done)
        }
        WorkloadOp::Insert { k, values } => tree
            .block_insert(*k, values.clone())
            .map(|_| OpOutcome::Done),
        WorkloadOp::Delete { k, m } => tree.block_delete(*k, *m).map(OpOutcome::Removed),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl Error for ParseError {}

fn parse_count(token: &[u8], what: &str, line: usize) -> Result<usize, ParseError> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .map(|v| v as usize)
        .ok_or_else(|| ParseError {
            line,
            message: format!("{what} is not a number: {}", String::from_utf8_lossy(token)),
        })
}

fn take_values(tokens: &[&[u8]], m: usize, line: usize) -> Result<Vec<Vec<u8>>, ParseError> {
    if tokens.len() != m {
        return Err(ParseError {
            line,
            message: format!("expected {m} value(s), found {}", tokens.len()),
        });
    }
    Ok(tokens.iter().map(|t| t.to_vec()).collect())
}

/// Parses a workload script. Returns ops in file order; fails with the
/// first offending line on arity mismatches, non-numeric k/m or unknown
/// verbs.
pub fn parse_workload(text: &[u8]) -> Result<Vec<WorkloadOp>, ParseError> {
    let mut ops = Vec::new();
    for (idx, raw_line) in text.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.last() {
            Some(b'\r') => &raw_line[..raw_line.len() - 1],
            _ => raw_line,
        };
        let tokens: Vec<&[u8]> = line
            .split(|&b| b == b' ' || b == b'\t')
            .filter(|t| !t.is_empty())
            .collect();
        let Some(&verb) = tokens.first() else {
            continue;
        };
        if verb.first() == Some(&b'#') {
            continue;
        }
        let op = match verb {
            b"APPEND" => {
                if tokens.len() < 2 {
                    return Err(ParseError {
                        line: line_no,
                        message: "APPEND needs m".into(),
                    });
                }
                let m = parse_count(tokens[1], "m", line_no)?;
                WorkloadOp::Append {
                    values: take_values(&tokens[2..], m, line_no)?,
                }
            }
            b"GET" | b"DELETE" => {
                if tokens.len() != 3 {
                    return Err(ParseError {
                        line: line_no,
                        message: format!("{} takes exactly k and m", String::from_utf8_lossy(verb)),
                    });
                }
                let k = parse_count(tokens[1], "k", line_no)?;
                let m = parse_count(tokens[2], "m", line_no)?;
                if verb == b"GET" {
                    WorkloadOp::Get { k, m }
                } else {
                    WorkloadOp::Delete { k, m }
                }
            }
            b"SET" | b"INSERT" => {
                if tokens.len() < 3 {
                    return Err(ParseError {
                        line: line_no,
                        message: format!("{} needs k and m", String::from_utf8_lossy(verb)),
                    });
                }
                let k = parse_count(tokens[1], "k", line_no)?;
                let m = parse_count(tokens[2], "m", line_no)?;
                let values = take_values(&tokens[3..], m, line_no)?;
                if verb == b"SET" {
                    WorkloadOp::Set { k, values }
                } else {
                    WorkloadOp::Insert { k, values }
                }
            }
            other => {
                return Err(ParseError {
                    line: line_no,
                    message: format!("unknown verb: {}", String::from_utf8_lossy(other)),
                });
            }
        };
        ops.push(op);
    }
    Ok(ops)
}

/// Canonical text form of one op (no trailing newline).
pub fn format_op(op: &WorkloadOp) -> Vec<u8> {
    fn push_values(out: &mut Vec<u8>, values: &[Vec<u8>]) {
        for v in values {
            out.push(b' ');
            out.extend_from_slice(v);
        }
    }
    let mut out = Vec::new();
    match op {
        WorkloadOp::Append { values } => {
            out.extend_from_slice(format!("APPEND {}", values.len()).as_bytes());
            push_values(&mut out, values);
        }
        WorkloadOp::Get { k, m } => {
            out.extend_from_slice(format!("GET {k} {m}").as_bytes());
        }
        WorkloadOp::Set { k, values } => {
            out.extend_from_slice(format!("SET {k} {}", values.len()).as_bytes());
            push_values(&mut out, values);
        }
        WorkloadOp::Insert { k, values } => {
            out.extend_from_slice(format!("INSERT {k} {}", values.len()).as_bytes());
            push_values(&mut out, values);
        }
        WorkloadOp::Delete { k, m } => {
            out.extend_from_slice(format!("DELETE {k} {m}").as_bytes());
        }
    }
    out
}

/// Canonical text form of a whole script, one op per line.
pub fn format_workload(ops: &[WorkloadOp]) -> Vec<u8> {
    let mut out = Vec::new();
    for op in ops {
        out.extend_from_slice(&format_op(op));
        out.push(b'\n');
    }
    out
}
