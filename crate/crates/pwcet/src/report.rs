//! CSV and JSON renderings of reports and curve dumps.
//!
//! Numbers use the shortest representation that parses back to the same
//! `f64`, with `.` as decimal separator and no grouping. Every document ends
//! with exactly one newline.

use pwcet_core::{Estimate, Family, GridSpec};
use serde::Serialize;

use crate::harness::{
    CurveDump, HoldoutRecord, ReportMetadata, ReportRow, RunKind, SampleRecord, TightnessReport,
};

/// Marker for an estimate no finite time reaches.
pub const UNREACHABLE: &str = "UNREACHABLE";
/// Marker for a missing reference quantile.
pub const UNKNOWN: &str = "UNKNOWN";
/// Marker for a tightness that cannot be computed.
pub const UNDEFINED: &str = "UNDEFINED";
/// Flag on rows whose tightness is below one.
pub const UNDERESTIMATE: &str = "UNDERESTIMATE";
/// Estimate cell of a failed row.
pub const FAILED: &str = "ERROR";

/// Shortest round-trip decimal form of `x`.
pub fn format_number(x: f64) -> String {
    let magnitude = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&magnitude) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Lower-case column name of a method.
pub fn column_name(method: Family) -> String {
    method.name().to_ascii_lowercase()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn estimate_cell(row: &ReportRow) -> String {
    match row.estimate {
        Some(Estimate::Time(t)) => format_number(t),
        Some(Estimate::Unreachable) => UNREACHABLE.into(),
        None => FAILED.into(),
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory writer cannot fail");
    String::from_utf8(bytes).expect("CSV fields are UTF-8")
}

/// One line per row, preceded by a header.
pub fn report_csv(report: &TightnessReport) -> String {
    let mut w = csv_writer();
    let header = [
        "target",
        "method",
        "seed",
        "p",
        "estimate",
        "true_quantile",
        "tightness",
        "flag",
        "fallback",
        "k",
        "d",
        "error",
    ];
    w.write_record(header).expect("in-memory writer cannot fail");
    for row in &report.rows {
        let record = [
            row.target.clone(),
            row.method.name().into(),
            row.seed.map(|s| s.to_string()).unwrap_or_default(),
            format_number(row.p),
            estimate_cell(row),
            row.true_quantile.map_or_else(|| UNKNOWN.into(), format_number),
            row.tightness().map_or_else(|| UNDEFINED.into(), format_number),
            if row.is_underestimate() { UNDERESTIMATE.into() } else { String::new() },
            row.fallback.to_string(),
            row.witness.map(|w| format_number(w.k())).unwrap_or_default(),
            row.witness
                .filter(|w| w.family().is_saturating())
                .map(|w| format_number(w.d()))
                .unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
        ];
        w.write_record(&record).expect("in-memory writer cannot fail");
    }
    finish(w)
}

/// A number, or a marker where no number exists.
#[derive(Serialize)]
#[serde(untagged)]
enum Cell {
    Number(f64),
    Marker(&'static str),
}

#[derive(Serialize)]
struct JsonReport<'a> {
    metadata: JsonMetadata<'a>,
    rows: Vec<JsonRow<'a>>,
}

#[derive(Serialize)]
struct JsonGrid {
    k_min: f64,
    k_max: f64,
    k_count: usize,
    /// `null` means anchored to each sample (see `samples[].d_axis`).
    d_min: Option<f64>,
    d_max: Option<f64>,
    d_count: usize,
}

impl From<&GridSpec> for JsonGrid {
    fn from(g: &GridSpec) -> Self {
        Self {
            k_min: g.k_min,
            k_max: g.k_max,
            k_count: g.k_count,
            d_min: g.d_min,
            d_max: g.d_max,
            d_count: g.d_count,
        }
    }
}

#[derive(Serialize)]
struct JsonMetadata<'a> {
    kind: &'static str,
    methods: Vec<&'static str>,
    probabilities: &'a [f64],
    n: usize,
    seeds: &'a [u64],
    grid: JsonGrid,
    safeguard: JsonSafeguard,
    samples: Vec<JsonSample<'a>>,
    fallbacks: Vec<JsonFallback<'a>>,
    truncation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    holdout: Option<JsonHoldout>,
    underestimates: usize,
    errors: usize,
}

#[derive(Serialize)]
struct JsonSafeguard {
    screen: &'static str,
    gamma: f64,
    fallback_enabled: bool,
}

#[derive(Serialize)]
struct JsonSample<'a> {
    target: &'a str,
    seed: Option<u64>,
    n: usize,
    sha256: String,
    rejected_negative: u64,
    d_axis: Option<JsonAxis>,
}

#[derive(Serialize)]
struct JsonAxis {
    min: f64,
    max: f64,
    count: usize,
}

#[derive(Serialize, PartialEq)]
struct JsonFallback<'a> {
    target: &'a str,
    seed: Option<u64>,
    method: &'static str,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonHoldout {
    Quantile { quantile: f64 },
    Trace { n: usize, sha256: String },
}

#[derive(Serialize)]
struct JsonRow<'a> {
    target: &'a str,
    method: &'static str,
    seed: Option<u64>,
    p: f64,
    estimate: Cell,
    true_quantile: Cell,
    tightness: Cell,
    underestimate: bool,
    fallback: bool,
    k: Option<f64>,
    d: Option<f64>,
    error: Option<&'a str>,
}

const TRUNCATION_NOTE: &str =
    "negative draws are rejected and redrawn; true quantiles refer to the untruncated distribution";
const SCREEN: &str = "max-sample dominance: g(x_max)^k / sum g(x_i)^k <= gamma";

fn json_sample(s: &SampleRecord) -> JsonSample<'_> {
    JsonSample {
        target: &s.target,
        seed: s.seed,
        n: s.n,
        sha256: hex(&s.digest),
        rejected_negative: s.rejected,
        d_axis: s.d_axis.map(|(min, max, count)| JsonAxis { min, max, count }),
    }
}

fn json_metadata<'a>(meta: &'a ReportMetadata, rows: &'a [ReportRow]) -> JsonMetadata<'a> {
    let mut fallbacks: Vec<JsonFallback<'a>> = Vec::new();
    for row in rows.iter().filter(|r| r.fallback) {
        let entry = JsonFallback {
            target: &row.target,
            seed: row.seed,
            method: row.method.name(),
        };
        if !fallbacks.contains(&entry) {
            fallbacks.push(entry);
        }
    }
    JsonMetadata {
        kind: match meta.kind {
            RunKind::Synthetic => "synthetic",
            RunKind::Trace => "trace",
        },
        methods: meta.methods.iter().map(|m| m.name()).collect(),
        probabilities: &meta.probabilities,
        n: meta.n,
        seeds: &meta.seeds,
        grid: JsonGrid::from(&meta.grid),
        safeguard: JsonSafeguard {
            screen: SCREEN,
            gamma: meta.gamma,
            fallback_enabled: meta.fallback_enabled,
        },
        samples: meta.samples.iter().map(json_sample).collect(),
        fallbacks,
        truncation: TRUNCATION_NOTE,
        holdout: meta.holdout.as_ref().map(|h| match h {
            HoldoutRecord::Quantile(q) => JsonHoldout::Quantile { quantile: *q },
            HoldoutRecord::Trace { n, digest } => JsonHoldout::Trace {
                n: *n,
                sha256: hex(digest),
            },
        }),
        underestimates: rows.iter().filter(|r| r.is_underestimate()).count(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
    }
}

fn json_row(row: &ReportRow) -> JsonRow<'_> {
    JsonRow {
        target: &row.target,
        method: row.method.name(),
        seed: row.seed,
        p: row.p,
        estimate: match row.estimate {
            Some(Estimate::Time(t)) => Cell::Number(t),
            Some(Estimate::Unreachable) => Cell::Marker(UNREACHABLE),
            None => Cell::Marker(FAILED),
        },
        true_quantile: row.true_quantile.map_or(Cell::Marker(UNKNOWN), Cell::Number),
        tightness: row.tightness().map_or(Cell::Marker(UNDEFINED), Cell::Number),
        underestimate: row.is_underestimate(),
        fallback: row.fallback,
        k: row.witness.map(|w| w.k()),
        d: row.witness.filter(|w| w.family().is_saturating()).map(|w| w.d()),
        error: row.error.as_deref(),
    }
}

/// Report with full provenance, pretty-printed.
pub fn report_json(report: &TightnessReport) -> String {
    let doc = JsonReport {
        metadata: json_metadata(&report.metadata, &report.rows),
        rows: report.rows.iter().map(json_row).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report is serialisable");
    out.push('\n');
    out
}

fn curve_header(dump: &CurveDump) -> Vec<String> {
    let mut header = vec!["b".to_owned(), "empirical".to_owned()];
    header.extend(dump.columns.iter().map(|c| column_name(c.method)));
    header.extend(dump.per_k.iter().map(|(k, _)| format!("k={}", format_number(*k))));
    header
}

/// `b,empirical,<methods...>[,k=<v>...]`, one line per grid point.
pub fn curves_csv(dump: &CurveDump) -> String {
    let mut w = csv_writer();
    w.write_record(curve_header(dump)).expect("in-memory writer cannot fail");
    for (i, &b) in dump.b.iter().enumerate() {
        let mut record = vec![format_number(b), format_number(dump.empirical[i])];
        record.extend(dump.columns.iter().map(|c| format_number(c.values[i])));
        record.extend(dump.per_k.iter().map(|(_, v)| format_number(v[i])));
        w.write_record(&record).expect("in-memory writer cannot fail");
    }
    finish(w)
}

#[derive(Serialize)]
struct JsonCurves<'a> {
    sha256: String,
    b: &'a [f64],
    empirical: &'a [f64],
    methods: Vec<JsonCurveColumn<'a>>,
    per_k: Vec<JsonPerK<'a>>,
}

#[derive(Serialize)]
struct JsonCurveColumn<'a> {
    method: &'static str,
    fallback: bool,
    values: &'a [f64],
}

#[derive(Serialize)]
struct JsonPerK<'a> {
    k: f64,
    values: &'a [f64],
}

/// Curve dump as JSON arrays.
pub fn curves_json(dump: &CurveDump) -> String {
    let doc = JsonCurves {
        sha256: hex(&dump.digest),
        b: &dump.b,
        empirical: &dump.empirical,
        methods: dump
            .columns
            .iter()
            .map(|c| JsonCurveColumn {
                method: c.method.name(),
                fallback: c.fallback,
                values: &c.values,
            })
            .collect(),
        per_k: dump.per_k.iter().map(|(k, values)| JsonPerK { k: *k, values }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("curves are serialisable");
    out.push('\n');
    out
}
