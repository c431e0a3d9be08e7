//! Plain-text execution-time traces.
//!
//! One non-negative decimal per line. Lines starting with `#` are comments,
//! blank lines are skipped. A comment of the form `# unit: ms` before the
//! first value declares the unit (`s`, `ms`, `us` or `ns`, default `s`);
//! values are converted to seconds on load.

use std::fmt::Write as _;

use pwcet_core::SampleSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("empty trace")]
    Empty,
    #[error("line {line}: cannot parse {text:?} as an execution time")]
    Parse { line: usize, text: String },
    #[error("line {line}: negative execution time {value}")]
    Negative { line: usize, value: f64 },
    #[error("line {line}: execution time is not finite")]
    NonFinite { line: usize },
    #[error("line {line}: unknown unit {unit:?} (expected s, ms, us or ns)")]
    UnknownUnit { line: usize, unit: String },
    #[error("line {line}: unit declared after the first value")]
    LateUnit { line: usize },
}

/// Time unit of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Seconds,
    Millis,
    Micros,
    Nanos,
}

impl Unit {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "s" => Some(Unit::Seconds),
            "ms" => Some(Unit::Millis),
            "us" => Some(Unit::Micros),
            "ns" => Some(Unit::Nanos),
            _ => None,
        }
    }

    /// Units per second.
    fn per_second(self) -> f64 {
        match self {
            Unit::Seconds => 1.0,
            Unit::Millis => 1e3,
            Unit::Micros => 1e6,
            Unit::Nanos => 1e9,
        }
    }
}

/// Returns the declared unit if `comment` (without the leading `#`) is a
/// unit header.
fn unit_header(comment: &str) -> Option<&str> {
    let (key, value) = comment.split_once(':')?;
    key.trim().eq_ignore_ascii_case("unit").then(|| value.trim())
}

/// Parses a trace into values in seconds, in file order.
pub fn parse_trace(text: &str) -> Result<Vec<f64>, TraceError> {
    let mut unit = Unit::Seconds;
    let mut values = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(declared) = unit_header(comment) {
                if !values.is_empty() {
                    return Err(TraceError::LateUnit { line });
                }
                unit = Unit::parse(declared).ok_or_else(|| TraceError::UnknownUnit {
                    line,
                    unit: declared.to_owned(),
                })?;
            }
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| TraceError::Parse {
            line,
            text: trimmed.to_owned(),
        })?;
        if value.is_nan() || value.is_infinite() {
            return Err(TraceError::NonFinite { line });
        }
        if value < 0.0 {
            return Err(TraceError::Negative { line, value });
        }
        // division by an exact power of ten rounds once
        values.push(value / unit.per_second());
    }
    if values.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok(values)
}

/// Parses a trace straight into a [`SampleSet`].
pub fn load_trace(text: &str) -> Result<SampleSet, TraceError> {
    let values = parse_trace(text)?;
    // parse_trace only admits finite, non-negative values
    Ok(SampleSet::new(values).expect("validated trace"))
}

/// Serialises values one per line with 17 significant digits, which
/// [`parse_trace`] reads back bit for bit.
pub fn format_trace(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for v in values {
        writeln!(out, "{v:.16e}").expect("writing to a String cannot fail");
    }
    out
}
