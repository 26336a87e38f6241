//! Text parsers for untrusted CLI input: observation files and grid lists.
//!
//! These must never panic, whatever the bytes; the fuzz targets under
//! `fuzz/` drive them with arbitrary input.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("input contains no numeric values")]
    Empty,
    #[error("line {line}: cannot parse {token:?} as a number")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: value {token:?} is not finite")]
    NonFinite { line: usize, token: String },
    #[error("invalid list {input:?}: {reason}")]
    BadList { input: String, reason: String },
}

/// Parsed observations with the 1-based input line each value came from,
/// so later domain errors can point back at the offending line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSample {
    pub values: Vec<f64>,
    pub lines: Vec<usize>,
}

fn clip(token: &str) -> String {
    token.chars().take(32).collect()
}

/// Parse whitespace/newline-delimited numbers, or a single-column CSV with
/// an optional header. Commas and semicolons count as separators; the first
/// non-empty line may be a header (skipped iff any of its tokens is not a
/// number).
pub fn parse_sample_text(text: &str) -> Result<ParsedSample, InputError> {
    let mut values = Vec::new();
    let mut lines = Vec::new();
    let mut first_content_line = true;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens: Vec<&str> = raw_line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            continue;
        }
        let mut parsed = Vec::with_capacity(tokens.len());
        let mut failed = None;
        for token in &tokens {
            match token.parse::<f64>() {
                Ok(v) => parsed.push((v, *token)),
                Err(_) => {
                    failed = Some(*token);
                    break;
                }
            }
        }
        if let Some(token) = failed {
            if first_content_line {
                // header row
                first_content_line = false;
                continue;
            }
            return Err(InputError::InvalidNumber {
                line: line_no,
                token: clip(token),
            });
        }
        for (v, token) in parsed {
            if !v.is_finite() {
                return Err(InputError::NonFinite {
                    line: line_no,
                    token: clip(token),
                });
            }
            values.push(v);
            lines.push(line_no);
        }
        first_content_line = false;
    }
    if values.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(ParsedSample { values, lines })
}

/// Comma-separated list of finite floats, e.g. "0.1,0.2,0.9".
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, InputError> {
    let mut out = Vec::new();
    for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: f64 = token.parse().map_err(|_| InputError::BadList {
            input: clip(s),
            reason: format!("{:?} is not a number", clip(token)),
        })?;
        if !v.is_finite() {
            return Err(InputError::BadList {
                input: clip(s),
                reason: format!("{:?} is not finite", clip(token)),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(InputError::BadList {
            input: clip(s),
            reason: "empty list".into(),
        });
    }
    Ok(out)
}

const MAX_GRID: usize = 100_000;

/// Positive-integer grid: a single value "7", a comma list "2,5,9", or an
/// inclusive range "1..30".
pub fn parse_usize_spec(s: &str) -> Result<Vec<usize>, InputError> {
    let bad = |reason: String| InputError::BadList {
        input: clip(s),
        reason,
    };
    let trimmed = s.trim();
    if let Some((lo, hi)) = trimmed.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| bad(format!("{:?} is not a positive integer", clip(lo))))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| bad(format!("{:?} is not a positive integer", clip(hi))))?;
        if lo == 0 || hi < lo {
            return Err(bad(format!("range {lo}..{hi} is empty or starts at zero")));
        }
        if hi - lo >= MAX_GRID {
            return Err(bad(format!("range {lo}..{hi} is too large")));
        }
        return Ok((lo..=hi).collect());
    }
    let mut out = Vec::new();
    for token in trimmed.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: usize = token
            .parse()
            .map_err(|_| bad(format!("{:?} is not a positive integer", clip(token))))?;
        if v == 0 {
            return Err(bad("values must be >= 1".into()));
        }
        out.push(v);
        if out.len() > MAX_GRID {
            return Err(bad("list is too large".into()));
        }
    }
    if out.is_empty() {
        return Err(bad("empty list".into()));
    }
    Ok(out)
}
