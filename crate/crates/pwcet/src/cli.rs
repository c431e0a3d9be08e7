//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for input or validation errors, 3 when the
//! computation itself fails (for example an empty admissible set with the
//! fallback disabled).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwcet_core::{Family, GridSpec, SampleSet, DEFAULT_GAMMA};

use crate::harness::{
    self, AnalysisConfig, EvaluationPlan, Holdout, HarnessError, DEFAULT_CURVE_POINTS,
    DEFAULT_PROBABILITIES,
};
use crate::report;
use crate::synthetic::{self, DistributionSpec, BUILTIN_NAMES};
use crate::trace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

const DESK_N: usize = 100_000;
const FULL_SCALE_N: usize = 1_000_000;
const TRACE_PROBABILITY: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "pwcet", version, about = "Probabilistic WCET estimation from execution-time samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate pWCETs from a trace file.
    Analyze(AnalyzeArgs),
    /// Evaluate the estimators on built-in distributions.
    Eval(EvalArgs),
    /// Write samples of a distribution as a trace.
    Synth(SynthArgs),
    /// Export envelope and empirical CCDF curves for plotting.
    Curves(CurvesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// Methods to run (memik, atan, tanh or all); comma-separated or repeated.
    #[arg(long = "method", value_delimiter = ',', default_value = "all")]
    pub methods: Vec<String>,
    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_count: Option<usize>,
    /// Smallest scale divisor; defaults to median / 100 of the sample.
    #[arg(long)]
    pub d_min: Option<f64>,
    /// Largest scale divisor; defaults to 100 * max of the sample.
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub d_count: Option<usize>,
    /// Dominance threshold of the parameter screen, in (0, 1].
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Fail instead of falling back to the smallest k when the screen
    /// rejects every parameter.
    #[arg(long)]
    pub no_fallback: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trace file.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Exceedance probabilities [default: 1e-5].
    #[arg(long = "prob", value_delimiter = ',')]
    pub probabilities: Vec<f64>,
    /// Larger independent trace whose empirical quantiles serve as ground truth.
    #[arg(long, conflicts_with = "holdout_quantile")]
    pub holdout: Option<PathBuf>,
    /// Known reference quantile, used for every probability.
    #[arg(long)]
    pub holdout_quantile: Option<f64>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Built-in names, spec files, or `all`; comma-separated or repeated.
    #[arg(long = "spec", value_delimiter = ',', default_value = "all")]
    pub specs: Vec<String>,
    /// Exceedance probabilities [default: 1e-7, 1e-8, ..., 1e-15].
    #[arg(long = "prob", value_delimiter = ',')]
    pub probabilities: Vec<f64>,
    /// Sample size per seed [default: 100000].
    #[arg(long, value_parser = parse_count, conflicts_with = "full_scale")]
    pub n: Option<usize>,
    /// Use 10^6 samples per seed.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long = "seed", value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Built-in name or spec file.
    #[arg(long)]
    pub spec: String,
    /// Number of values [default: 100000].
    #[arg(long, value_parser = parse_count, conflicts_with = "full_scale")]
    pub n: Option<usize>,
    /// Write 10^6 values.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Trace file.
    #[arg(long, short, required_unless_present = "spec", conflicts_with = "spec")]
    pub input: Option<PathBuf>,
    /// Built-in name or spec file to sample from.
    #[arg(long)]
    pub spec: Option<String>,
    /// Sample size when sampling a spec [default: 100000].
    #[arg(long, value_parser = parse_count, conflicts_with = "full_scale")]
    pub n: Option<usize>,
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// The grid extends to 4x the MEMIK estimate at the smallest of these
    /// [default: 1e-7, ..., 1e-15].
    #[arg(long = "prob", value_delimiter = ',')]
    pub probabilities: Vec<f64>,
    /// Also export single power bounds for these k.
    #[arg(long, value_delimiter = ',')]
    pub per_k: Vec<f64>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Accepts plain integers and integral scientific forms such as `1e5`.
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= (1u64 << 53) as f64 => Ok(x as usize),
        _ => Err(format!("expected a non-negative integer, got {s:?}")),
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn compute(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_COMPUTE,
            message: message.into(),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Core(pwcet_core::Error::EmptyAdmissibleSet) => Failure::compute(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Errors
/// are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Curves(a) => cmd_curves(a),
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let samples = read_trace(&args.input)?;
    let probabilities = or_default(&args.probabilities, &[TRACE_PROBABILITY]);
    let analysis = analysis_config(&args.estimator, &probabilities)?;
    let holdout = match (&args.holdout, args.holdout_quantile) {
        (Some(path), _) => Some(Holdout::Trace(read_trace(path)?)),
        (None, Some(q)) if q.is_finite() && q > 0.0 => Some(Holdout::Quantile(q)),
        (None, Some(q)) => return Err(Failure::input(format!("holdout quantile must be positive, got {q}"))),
        (None, None) => None,
    };
    let label = args
        .input
        .file_stem()
        .map_or_else(|| "trace".to_owned(), |s| s.to_string_lossy().into_owned());
    let report = harness::run_trace(&label, &samples, &analysis, holdout.as_ref());
    emit_report(&report, &args.output)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let targets = resolve_specs(&args.specs)?;
    let probabilities = or_default(&args.probabilities, &DEFAULT_PROBABILITIES);
    let analysis = analysis_config(&args.estimator, &probabilities)?;
    let n = sample_size(args.n, args.full_scale);
    let plan = EvaluationPlan::new(targets, n, args.seeds.clone(), analysis)?;
    let report = harness::run_synthetic(&plan);
    emit_report(&report, &args.output)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), Failure> {
    let spec = resolve_spec(&args.spec)?;
    let n = sample_size(args.n, args.full_scale);
    let draws = synthetic::draw(&spec, n, args.seed).map_err(|e| Failure::input(e.to_string()))?;
    write_output(args.output.as_deref(), &trace::format_trace(&draws.values))
}

pub fn cmd_curves(args: &CurvesArgs) -> Result<(), Failure> {
    let samples = match (&args.input, &args.spec) {
        (Some(path), _) => read_trace(path)?,
        (None, Some(name)) => {
            let spec = resolve_spec(name)?;
            let n = sample_size(args.n, args.full_scale);
            synthetic::sample(&spec, n, args.seed).map_err(|e| Failure::input(e.to_string()))?
        }
        (None, None) => return Err(Failure::input("either --input or --spec is required")),
    };
    let probabilities = or_default(&args.probabilities, &DEFAULT_PROBABILITIES);
    let analysis = analysis_config(&args.estimator, &probabilities)?;
    if let Some(&k) = args.per_k.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(Failure::input(format!("per-k exponents must be positive, got {k}")));
    }
    let p_min = analysis.probabilities()[analysis.probabilities().len() - 1];
    let b_grid = harness::default_b_grid(
        &samples,
        analysis.grid(),
        analysis.gamma(),
        p_min,
        DEFAULT_CURVE_POINTS,
    )?;
    let dump = harness::dump_curves(
        &samples,
        analysis.methods(),
        analysis.grid(),
        analysis.gamma(),
        &b_grid,
        &args.per_k,
    )?;
    if !analysis.fallback() {
        if let Some(column) = dump.columns.iter().find(|c| c.fallback) {
            return Err(Failure::compute(format!(
                "{}: {}",
                column.method,
                pwcet_core::Error::EmptyAdmissibleSet
            )));
        }
    }
    let text = match args.output.format {
        Format::Csv => report::curves_csv(&dump),
        Format::Json => report::curves_json(&dump),
    };
    write_output(args.output.output.as_deref(), &text)
}

fn or_default(given: &[f64], default: &[f64]) -> Vec<f64> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

fn sample_size(n: Option<usize>, full_scale: bool) -> usize {
    n.unwrap_or(if full_scale { FULL_SCALE_N } else { DESK_N })
}

fn parse_methods(names: &[String]) -> Result<Vec<Family>, Failure> {
    let mut methods = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            methods.extend(Family::ALL);
        } else {
            let family = Family::from_name(name).ok_or_else(|| {
                Failure::input(format!("unknown method {name:?} (expected memik, atan, tanh or all)"))
            })?;
            methods.push(family);
        }
    }
    Ok(methods)
}

fn analysis_config(args: &EstimatorArgs, probabilities: &[f64]) -> Result<AnalysisConfig, Failure> {
    let defaults = GridSpec::default();
    let grid = GridSpec {
        k_min: args.k_min.unwrap_or(defaults.k_min),
        k_max: args.k_max.unwrap_or(defaults.k_max),
        k_count: args.k_count.unwrap_or(defaults.k_count),
        d_min: args.d_min,
        d_max: args.d_max,
        d_count: args.d_count.unwrap_or(defaults.d_count),
    };
    check_positive("k-min", grid.k_min)?;
    check_positive("k-max", grid.k_max)?;
    for (name, d) in [("d-min", grid.d_min), ("d-max", grid.d_max)] {
        if let Some(d) = d {
            check_positive(name, d)?;
        }
    }
    if grid.k_min > grid.k_max {
        return Err(Failure::input("--k-min exceeds --k-max"));
    }
    if let (Some(lo), Some(hi)) = (grid.d_min, grid.d_max) {
        if lo > hi {
            return Err(Failure::input("--d-min exceeds --d-max"));
        }
    }
    if grid.k_count == 0 || grid.d_count == 0 || (grid.k_count > 1 && grid.k_min == grid.k_max) {
        return Err(Failure::input("grid counts must be positive and match their ranges"));
    }
    Ok(AnalysisConfig::new(&parse_methods(&args.methods)?, probabilities)?
        .with_grid(grid)
        .with_gamma(args.gamma)?
        .with_fallback(!args.no_fallback))
}

fn check_positive(name: &str, value: f64) -> Result<(), Failure> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Failure::input(format!("--{name} must be positive, got {value}")))
    }
}

fn read_trace(path: &Path) -> Result<SampleSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    trace::load_trace(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// A built-in name, or else a JSON spec file.
fn resolve_spec(name: &str) -> Result<DistributionSpec, Failure> {
    if let Some(spec) = synthetic::builtin(name) {
        return Ok(spec);
    }
    let path = Path::new(name);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())));
    }
    Err(Failure::input(format!(
        "unknown spec {name:?}; valid names: {}",
        BUILTIN_NAMES.join(", ")
    )))
}

fn resolve_specs(names: &[String]) -> Result<Vec<DistributionSpec>, Failure> {
    let mut specs = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            specs.extend(synthetic::builtin_specs());
        } else {
            specs.push(resolve_spec(name)?);
        }
    }
    Ok(specs)
}

fn emit_report(report: &harness::TightnessReport, output: &OutputArgs) -> Result<(), Failure> {
    let text = match output.format {
        Format::Csv => report::report_csv(report),
        Format::Json => report::report_json(report),
    };
    write_output(output.output.as_deref(), &text)?;
    let failed = report.errors().count();
    if failed > 0 {
        return Err(Failure::compute(format!("{failed} row(s) failed; see the error column")));
    }
    Ok(())
}

/// Writes to `path` atomically (temporary file, then rename), or to
/// standard output.
fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(text.as_bytes())
            .and_then(|()| stdout.flush())
            .map_err(|e| Failure::input(format!("standard output: {e}")));
    };
    let fail = |e: std::io::Error| Failure::input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
