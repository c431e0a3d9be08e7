//! Evaluation protocol: run the estimators on synthetic distributions or on
//! traces, compare them with ground truth and collect plot data.
//!
//! Within one (target, seed) cell every method sees the same [`SampleSet`];
//! the report records its digest so this can be checked afterwards. Failures
//! are confined to the rows they affect.

use pwcet_core::{
    build_pwcet_curve, build_pwcet_curve_or_fallback, BoundCurve, BoundParams, Estimate, Family,
    GridSpec, ParamGrid, PwcetCurve, SampleSet, DEFAULT_GAMMA,
};
use thiserror::Error;

use crate::synthetic::{self, DistributionSpec, SynthError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] pwcet_core::Error),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Exceedance probabilities used when none are requested.
pub const DEFAULT_PROBABILITIES: [f64; 9] = [1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-13, 1e-14, 1e-15];

/// Number of points in a default curve grid.
pub const DEFAULT_CURVE_POINTS: usize = 512;

/// What to estimate and how: shared by synthetic and trace runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    methods: Vec<Family>,
    probabilities: Vec<f64>,
    grid: GridSpec,
    gamma: f64,
    fallback: bool,
}

impl AnalysisConfig {
    /// Methods are deduplicated in their given order; probabilities are
    /// deduplicated and sorted from largest to smallest.
    pub fn new(methods: &[Family], probabilities: &[f64]) -> Result<Self> {
        let mut unique_methods = Vec::new();
        for &m in methods {
            if !unique_methods.contains(&m) {
                unique_methods.push(m);
            }
        }
        if unique_methods.is_empty() {
            return Err(HarnessError::InvalidPlan("no method selected".into()));
        }
        if probabilities.is_empty() {
            return Err(HarnessError::InvalidPlan("no probability requested".into()));
        }
        if let Some(&p) = probabilities.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(HarnessError::InvalidPlan(format!(
                "probabilities must lie in (0, 1), got {p}"
            )));
        }
        let mut probabilities = probabilities.to_vec();
        probabilities.sort_by(|a, b| b.total_cmp(a));
        probabilities.dedup();
        Ok(Self {
            methods: unique_methods,
            probabilities,
            grid: GridSpec::default(),
            gamma: DEFAULT_GAMMA,
            fallback: true,
        })
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(HarnessError::InvalidPlan(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// Whether an empty admissible set falls back to the smallest `k`
    /// (flagged) instead of failing the method.
    pub fn with_fallback(mut self, fallback: bool) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn methods(&self) -> &[Family] {
        &self.methods
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn fallback(&self) -> bool {
        self.fallback
    }

    fn build(&self, samples: &SampleSet, grid: &ParamGrid, method: Family) -> Result<PwcetCurve> {
        let curve = if self.fallback {
            build_pwcet_curve_or_fallback(samples, method, grid, self.gamma)?
        } else {
            build_pwcet_curve(samples, method, grid, self.gamma)?
        };
        Ok(curve)
    }
}

/// Synthetic evaluation: every target is sampled once per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPlan {
    targets: Vec<DistributionSpec>,
    n: usize,
    seeds: Vec<u64>,
    analysis: AnalysisConfig,
}

impl EvaluationPlan {
    pub fn new(
        targets: Vec<DistributionSpec>,
        n: usize,
        seeds: Vec<u64>,
        analysis: AnalysisConfig,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(HarnessError::InvalidPlan("no target selected".into()));
        }
        if n == 0 {
            return Err(HarnessError::InvalidPlan("sample size must be at least 1".into()));
        }
        if seeds.is_empty() {
            return Err(HarnessError::InvalidPlan("no seed given".into()));
        }
        Ok(Self {
            targets,
            n,
            seeds,
            analysis,
        })
    }

    pub fn targets(&self) -> &[DistributionSpec] {
        &self.targets
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn analysis(&self) -> &AnalysisConfig {
        &self.analysis
    }
}

/// One estimate compared with its reference quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub target: String,
    pub method: Family,
    /// `None` for trace runs.
    pub seed: Option<u64>,
    pub p: f64,
    /// `None` when the row failed before an estimate was produced.
    pub estimate: Option<Estimate>,
    /// `None` when no reference quantile is known.
    pub true_quantile: Option<f64>,
    /// The envelope came from the fallback set.
    pub fallback: bool,
    /// Bound parameters attaining the estimate.
    pub witness: Option<BoundParams>,
    pub error: Option<String>,
}

impl ReportRow {
    /// `estimate / true_quantile` when both are finite and the quantile is
    /// positive.
    pub fn tightness(&self) -> Option<f64> {
        let estimate = self.estimate?.time()?;
        let q = self.true_quantile?;
        (q > 0.0 && q.is_finite()).then(|| estimate / q)
    }

    pub fn is_underestimate(&self) -> bool {
        self.tightness().is_some_and(|t| t < 1.0)
    }
}

/// Where the rows came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Synthetic,
    Trace,
}

/// Provenance of one sample set used by the run.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub target: String,
    pub seed: Option<u64>,
    pub n: usize,
    /// SHA-256 of the sorted sample; equal for all methods of a cell.
    pub digest: [u8; 32],
    /// Negative draws that were rejected and redrawn.
    pub rejected: u64,
    /// Resolved `d` range of the grid, as `(min, max, count)`.
    pub d_axis: Option<(f64, f64, usize)>,
}

/// Reference used to judge trace estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum Holdout {
    /// One reference quantile, applied to every requested probability.
    Quantile(f64),
    /// Empirical quantiles of a separate, larger trace.
    Trace(SampleSet),
}

impl Holdout {
    /// Reference quantile at `p`; `None` where the holdout has fewer than
    /// one expected exceedance.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        match self {
            Holdout::Quantile(q) => Some(*q),
            Holdout::Trace(samples) => {
                if samples.count() as f64 * p < 1.0 {
                    None
                } else {
                    samples.exceedance_quantile(p).ok()
                }
            }
        }
    }
}

/// Summary of the holdout kept in the report.
#[derive(Debug, Clone, PartialEq)]
pub enum HoldoutRecord {
    Quantile(f64),
    Trace { n: usize, digest: [u8; 32] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub kind: RunKind,
    pub methods: Vec<Family>,
    pub probabilities: Vec<f64>,
    /// Sample size per cell.
    pub n: usize,
    pub seeds: Vec<u64>,
    pub grid: GridSpec,
    pub gamma: f64,
    pub fallback_enabled: bool,
    pub samples: Vec<SampleRecord>,
    pub holdout: Option<HoldoutRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

impl TightnessReport {
    pub fn underestimates(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.is_underestimate())
    }

    pub fn errors(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Draws one sample set per (target, seed), runs every method on it and
/// compares each estimate with the distribution's exact quantile.
pub fn run_synthetic(plan: &EvaluationPlan) -> TightnessReport {
    let analysis = &plan.analysis;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for target in &plan.targets {
        let label = target.label();
        let quantiles: Vec<std::result::Result<f64, SynthError>> =
            analysis.probabilities.iter().map(|&p| target.true_quantile(p)).collect();
        for &seed in &plan.seeds {
            let cell = match synthetic::draw(target, plan.n, seed) {
                Ok(draws) => {
                    // draws are finite and non-negative by construction
                    let sample_set = SampleSet::new(draws.values).expect("sampler produced an invalid value");
                    let grid = analysis.grid.resolve(&sample_set);
                    samples.push(sample_record(label, Some(seed), &sample_set, draws.rejected, grid.as_ref().ok()));
                    grid.map(|g| (sample_set, g)).map_err(HarnessError::from)
                }
                Err(e) => Err(e.into()),
            };
            for &method in &analysis.methods {
                let curve = cell
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|(s, grid)| analysis.build(s, grid, method));
                for (i, &p) in analysis.probabilities.iter().enumerate() {
                    let mut row = estimate_row(label, method, Some(seed), p, &curve);
                    match &quantiles[i] {
                        Ok(q) => row.true_quantile = Some(*q),
                        Err(e) if row.error.is_none() => row.error = Some(format!("quantile: {e}")),
                        Err(_) => {}
                    }
                    rows.push(row);
                }
            }
        }
    }
    TightnessReport {
        metadata: ReportMetadata {
            kind: RunKind::Synthetic,
            methods: analysis.methods.clone(),
            probabilities: analysis.probabilities.clone(),
            n: plan.n,
            seeds: plan.seeds.clone(),
            grid: analysis.grid,
            gamma: analysis.gamma,
            fallback_enabled: analysis.fallback,
            samples,
            holdout: None,
        },
        rows,
    }
}

/// Estimates from a measured trace. Tightness is only available when a
/// holdout supplies the reference quantiles.
pub fn run_trace(
    label: &str,
    samples: &SampleSet,
    analysis: &AnalysisConfig,
    holdout: Option<&Holdout>,
) -> TightnessReport {
    let grid = analysis.grid.resolve(samples).map_err(HarnessError::from);
    let mut rows = Vec::new();
    for &method in &analysis.methods {
        let curve = grid
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|g| analysis.build(samples, g, method));
        for &p in &analysis.probabilities {
            let mut row = estimate_row(label, method, None, p, &curve);
            row.true_quantile = holdout.and_then(|h| h.quantile(p));
            rows.push(row);
        }
    }
    let holdout = holdout.map(|h| match h {
        Holdout::Quantile(q) => HoldoutRecord::Quantile(*q),
        Holdout::Trace(s) => HoldoutRecord::Trace {
            n: s.count(),
            digest: *s.digest(),
        },
    });
    TightnessReport {
        metadata: ReportMetadata {
            kind: RunKind::Trace,
            methods: analysis.methods.clone(),
            probabilities: analysis.probabilities.clone(),
            n: samples.count(),
            seeds: Vec::new(),
            grid: analysis.grid,
            gamma: analysis.gamma,
            fallback_enabled: analysis.fallback,
            samples: vec![sample_record(label, None, samples, 0, grid.as_ref().ok())],
            holdout,
        },
        rows,
    }
}

fn sample_record(
    label: &str,
    seed: Option<u64>,
    samples: &SampleSet,
    rejected: u64,
    grid: Option<&ParamGrid>,
) -> SampleRecord {
    SampleRecord {
        target: label.to_owned(),
        seed,
        n: samples.count(),
        digest: *samples.digest(),
        rejected,
        d_axis: grid.map(|g| {
            let d = g.d_values();
            (d[0], d[d.len() - 1], d.len())
        }),
    }
}

fn estimate_row(
    label: &str,
    method: Family,
    seed: Option<u64>,
    p: f64,
    curve: &Result<PwcetCurve>,
) -> ReportRow {
    let mut row = ReportRow {
        target: label.to_owned(),
        method,
        seed,
        p,
        estimate: None,
        true_quantile: None,
        fallback: false,
        witness: None,
        error: None,
    };
    match curve {
        Ok(curve) => {
            row.fallback = curve.is_fallback();
            match curve.estimate_wcet(p) {
                Ok(est) => {
                    row.estimate = Some(est.estimate);
                    row.witness = est.witness;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// One method's envelope sampled on the dump grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveColumn {
    pub method: Family,
    pub values: Vec<f64>,
    pub fallback: bool,
}

/// Plot data: envelopes and the empirical CCDF on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDump {
    pub b: Vec<f64>,
    /// Fraction of samples at or above each `b`.
    pub empirical: Vec<f64>,
    pub columns: Vec<CurveColumn>,
    /// Individual power bounds, keyed by `k`, regardless of the screen.
    pub per_k: Vec<(f64, Vec<f64>)>,
    pub digest: [u8; 32],
}

/// Evaluates each method's envelope (with the fallback enabled) and the
/// empirical CCDF at every point of `b_grid`.
pub fn dump_curves(
    samples: &SampleSet,
    methods: &[Family],
    grid: &GridSpec,
    gamma: f64,
    b_grid: &[f64],
    per_k: &[f64],
) -> Result<CurveDump> {
    if b_grid.is_empty() {
        return Err(pwcet_core::Error::InvalidQuery { name: "b_grid", value: f64::NAN }.into());
    }
    if let Some(&b) = b_grid.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(pwcet_core::Error::InvalidQuery { name: "b_grid", value: b }.into());
    }
    if let Some(w) = b_grid.windows(2).find(|w| w[0] > w[1]) {
        return Err(pwcet_core::Error::InvalidQuery { name: "b_grid", value: w[1] }.into());
    }
    let resolved = grid.resolve(samples)?;
    let mut columns = Vec::with_capacity(methods.len());
    for &method in methods {
        let curve = build_pwcet_curve_or_fallback(samples, method, &resolved, gamma)?;
        let values = b_grid.iter().map(|&b| curve.envelope(b)).collect::<std::result::Result<_, _>>()?;
        columns.push(CurveColumn {
            method,
            values,
            fallback: curve.is_fallback(),
        });
    }
    let mut per_k_columns = Vec::with_capacity(per_k.len());
    for &k in per_k {
        let bound = BoundCurve::new(samples, BoundParams::new(Family::PowerK, k, 1.0)?);
        let values = b_grid.iter().map(|&b| bound.eval(b)).collect::<std::result::Result<_, _>>()?;
        per_k_columns.push((k, values));
    }
    Ok(CurveDump {
        b: b_grid.to_vec(),
        empirical: b_grid.iter().map(|&b| samples.exceedance(b)).collect(),
        columns,
        per_k: per_k_columns,
        digest: *samples.digest(),
    })
}

/// Log-spaced points from half the smallest positive sample up to four
/// times the power-family estimate at `p_min`.
pub fn default_b_grid(
    samples: &SampleSet,
    grid: &GridSpec,
    gamma: f64,
    p_min: f64,
    count: usize,
) -> Result<Vec<f64>> {
    let lo = samples
        .values()
        .iter()
        .copied()
        .find(|&v| v > 0.0)
        .map_or(1.0, |v| v / 2.0);
    let resolved = grid.resolve(samples)?;
    let curve = build_pwcet_curve_or_fallback(samples, Family::PowerK, &resolved, gamma)?;
    let estimate = curve.estimate_wcet(p_min)?.estimate.time().unwrap_or(0.0);
    let hi = (4.0 * estimate).max(2.0 * lo);
    Ok(pwcet_core::bounds::log_space(lo, hi, count))
}
