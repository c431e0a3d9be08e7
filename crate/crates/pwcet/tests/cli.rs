//! End-to-end runs of the `pwcet` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pwcet::harness::dump_curves;
use pwcet::synthetic::{builtin, sample};
use pwcet_core::{load_samples, Family, GridSpec, DEFAULT_GAMMA};
use tempfile::TempDir;

fn pwcet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwcet")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_trace(dir: &TempDir, name: &str, values: &[f64]) -> PathBuf {
    let path = dir.path().join(name);
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&path, text).unwrap();
    path
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn csv_records(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn analyze_reports_one_row_per_method() {
    let dir = TempDir::new().unwrap();
    let values = sample(&builtin("WeibullA").unwrap(), 10_000, 3).unwrap();
    let trace = write_trace(&dir, "trace.txt", values.values());
    let out = pwcet(&["analyze", "-i", arg(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let records = csv_records(&text);
    assert_eq!(records[0].join(","), "target,method,seed,p,estimate,true_quantile,tightness,flag,fallback,k,d,error");
    assert_eq!(records.len(), 4);
    let methods: Vec<&str> = records[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(methods, ["MEMIK", "ATAN", "TANH"]);
    assert!(records[1..].iter().all(|r| r[3] == "0.00001" || r[3] == "1e-5"));
    assert!(text.ends_with('\n') && !text.ends_with("\n\n"));
}

#[test]
fn malformed_traces_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let out = pwcet(&["analyze", "-i", arg(&empty)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty trace"), "{}", stderr(&out));

    let negative = dir.path().join("negative.txt");
    std::fs::write(&negative, "1\n2\n3\n4\n5\n6\n-7\n8\n").unwrap();
    let out = pwcet(&["analyze", "-i", arg(&negative)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 7"), "{}", stderr(&out));

    let missing = dir.path().join("absent.txt");
    assert_eq!(pwcet(&["analyze", "-i", arg(&missing)]).status.code(), Some(2));
}

#[test]
fn eval_single_cell_and_unknown_spec() {
    let args = ["eval", "--spec", "WeibullB", "--method", "memik", "--prob", "1e-9", "--n", "2000", "--seed", "1"];
    let out = pwcet(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let records = csv_records(&stdout(&out));
    assert_eq!(records.len(), 2);
    assert_eq!(&records[1][..3], ["WeibullB", "MEMIK", "1"]);
    let tightness: f64 = records[1][6].parse().unwrap();
    assert!(tightness >= 1.0);
    assert_eq!(stdout(&pwcet(&args)), stdout(&out));

    let out = pwcet(&["eval", "--spec", "GaussianZ"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("GaussianA"), "{}", stderr(&out));
}

#[test]
fn json_report_carries_metadata() {
    let args = ["eval", "--spec", "BetaA", "--prob", "1e-7", "--n", "1000", "--seed", "2", "--format", "json"];
    let out = pwcet(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    let digest = report["metadata"]["samples"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
}

#[test]
fn synth_output_round_trips_into_analyze() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("synth.txt");
    let out = pwcet(&["synth", "--spec", "GammaA", "--n", "10", "--seed", "4", "-o", arg(&path)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    let expected = pwcet::synthetic::draw(&builtin("GammaA").unwrap(), 10, 4).unwrap();
    // written values parse back bit for bit
    assert_eq!(parsed, expected.values);
    let out = pwcet(&["analyze", "-i", arg(&path), "--prob", "1e-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn synth_mixture_mean() {
    let out = pwcet(&["synth", "--spec", "MixtureD", "--n", "1e5"]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = stdout(&out).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 100_000);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let weibull_mean = |scale: f64| scale * libm::tgamma(1.0 + 1.0 / 8.0);
    let expected = 0.6 * weibull_mean(5.0) + 0.39 * weibull_mean(50.0) + 0.01 * weibull_mean(100.0);
    assert!((mean - expected).abs() < 0.01 * expected, "{mean} vs {expected}");
}

#[test]
fn synth_rejects_empty_sample() {
    assert_eq!(pwcet(&["synth", "--spec", "GammaA", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn curves_match_library_dump() {
    let dir = TempDir::new().unwrap();
    let values = sample(&builtin("WeibullB").unwrap(), 2000, 6).unwrap();
    let trace = write_trace(&dir, "trace.txt", values.values());
    let out = pwcet(&["curves", "-i", arg(&trace), "--per-k", "1,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let records = csv_records(&stdout(&out));
    assert_eq!(records[0].join(","), "b,empirical,memik,atan,tanh,k=1,k=2");
    let rows: Vec<Vec<f64>> = records[1..].iter().map(|r| r.iter().map(|v| v.parse().unwrap()).collect()).collect();
    for column in 1..records[0].len() {
        assert!(rows.windows(2).all(|w| w[0][column] >= w[1][column]), "column {}", records[0][column]);
    }
    // the trace holds the sample exactly, so the library reproduces the columns
    let reloaded = load_samples(values.values()).unwrap();
    let b: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let dump = dump_curves(&reloaded, &[Family::PowerK], &GridSpec::default(), DEFAULT_GAMMA, &b, &[]).unwrap();
    for (row, &v) in rows.iter().zip(&dump.columns[0].values) {
        assert_eq!(row[2], v);
    }
}

#[test]
fn curves_without_fallback_fail_on_empty_screen() {
    let dir = TempDir::new().unwrap();
    let trace = write_trace(&dir, "spiky.txt", &[1.0, 1.0, 100.0]);
    let out = pwcet(&["curves", "-i", arg(&trace), "--no-fallback"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn output_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("report.csv");
    let args = ["eval", "--spec", "GaussianA", "--method", "tanh", "--prob", "1e-8", "--n", "500", "--seed", "3"];
    let printed = stdout(&pwcet(&args));
    let mut with_file = args.to_vec();
    with_file.extend(["-o", arg(&path)]);
    let out = pwcet(&with_file);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}
