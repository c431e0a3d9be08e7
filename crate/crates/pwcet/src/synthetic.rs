//! Synthetic execution-time distributions with ground-truth quantiles.
//!
//! Single-family distributions are inverted directly: Gaussian and Weibull in
//! closed form, Beta and Gamma by bracketed bisection on their exact
//! regularized incomplete beta/gamma CCDF. Mixtures are inverted by
//! bisection on the weighted sum of component CCDFs.
//!
//! Sampling is deterministic in the seed. The random stream is SplitMix64
//! with the state initialised to the seed; uniforms and variates come from
//! `rand_distr` on top of it. Negative draws (possible for the Gaussian
//! families) are rejected and redrawn; ground-truth quantiles always refer
//! to the untruncated distribution.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::Distribution as _;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use statrs::function::{beta::beta_reg, erf, gamma::gamma_ur};
use thiserror::Error;

use pwcet_core::SampleSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),
    #[error("exceedance probability must lie in (0, 1), got {0}")]
    InvalidQuery(f64),
    #[error("could not bracket the quantile for p = {0}")]
    BracketFailure(f64),
    #[error("sample size must be at least 1")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, SynthError>;

/// Largest number of bracket doublings before giving up.
const MAX_DOUBLINGS: usize = 200;

/// One parametric family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum Component {
    Gaussian { mean: f64, sd: f64 },
    /// CDF `1 - exp(-(x / scale)^shape)`.
    Weibull { shape: f64, scale: f64 },
    /// Supported on `(0, 1)`.
    Beta { alpha: f64, beta: f64 },
    /// Shape/rate parameterisation, mean `shape / rate`.
    Gamma { shape: f64, rate: f64 },
}

impl Component {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SynthError::InvalidSpec(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            Component::Gaussian { mean, sd } => {
                if !mean.is_finite() {
                    return Err(SynthError::InvalidSpec(format!("mean must be finite, got {mean}")));
                }
                positive("sd", sd)
            }
            Component::Weibull { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)
            }
            Component::Beta { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            Component::Gamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate)
            }
        }
    }

    /// `P(X > x)`.
    pub fn ccdf(&self, x: f64) -> f64 {
        match *self {
            Component::Gaussian { mean, sd } => {
                0.5 * erf::erfc((x - mean) / (sd * std::f64::consts::SQRT_2))
            }
            Component::Weibull { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-(x / scale).powf(shape)).exp()
                }
            }
            Component::Beta { alpha, beta } => {
                if x <= 0.0 {
                    1.0
                } else if x >= 1.0 {
                    0.0
                } else {
                    // I_{1-x}(beta, alpha) keeps the upper tail accurate
                    beta_reg(beta, alpha, 1.0 - x)
                }
            }
            Component::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma_ur(shape, rate * x)
                }
            }
        }
    }

    /// `x` with `P(X > x) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(match *self {
            Component::Gaussian { mean, sd } => {
                // Phi^-1(1 - p) without forming 1 - p
                mean + sd * std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p)
            }
            Component::Weibull { shape, scale } => scale * (-p.ln()).powf(1.0 / shape),
            Component::Beta { .. } => 1.0 - self.beta_upper_gap(p)?,
            Component::Gamma { shape, rate } => {
                let ccdf = |x: f64| gamma_ur(shape, rate * x);
                let hi = bracket_above(ccdf, (shape / rate).max(1.0), p)?;
                bisect_decreasing(ccdf, 0.0, hi, p)
            }
        })
    }

    /// For a Beta component, `1 - x` at the quantile of `p`.
    ///
    /// Far in the upper tail the quantile lies closer to one than `f64`
    /// resolves (`1 - x` below `1e-16`), so the gap is solved for directly.
    pub fn beta_upper_gap(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let Component::Beta { alpha, beta } = *self else {
            return Err(SynthError::InvalidSpec("upper gap is defined for Beta only".into()));
        };
        // CCDF as a function of the gap y = 1 - x, solved on ln y.
        let ccdf = |ln_gap: f64| beta_reg(beta, alpha, ln_gap.exp().min(1.0));
        let mut lo = -1.0;
        let mut doublings = 0;
        while ccdf(lo) > p {
            lo *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS || lo < -745.0 {
                return Err(SynthError::BracketFailure(p));
            }
        }
        // increasing in ln y: bisect on the negated function
        let ln_gap = bisect_decreasing(|t| ccdf(-t), 0.0, -lo, p);
        Ok((-ln_gap).exp())
    }

    /// For a Beta component, `P(X > 1 - gap)`.
    pub fn beta_ccdf_at_gap(&self, gap: f64) -> Option<f64> {
        match *self {
            Component::Beta { alpha, beta } => Some(beta_reg(beta, alpha, gap.clamp(0.0, 1.0))),
            _ => None,
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        // Parameters are validated up front, so constructors cannot fail.
        match *self {
            Component::Gaussian { mean, sd } => rand_distr::Normal::new(mean, sd).unwrap().sample(rng),
            Component::Weibull { shape, scale } => {
                rand_distr::Weibull::new(scale, shape).unwrap().sample(rng)
            }
            Component::Beta { alpha, beta } => rand_distr::Beta::new(alpha, beta).unwrap().sample(rng),
            Component::Gamma { shape, rate } => {
                rand_distr::Gamma::new(shape, 1.0 / rate).unwrap().sample(rng)
            }
        }
    }
}

/// Single family or weighted mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distribution {
    Single(Component),
    Mixture(Vec<WeightedComponent>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedComponent {
    pub weight: f64,
    pub component: Component,
}

/// A named distribution.
///
/// Deserialization goes through [`DistributionSpec::new`], so a parsed spec
/// is always valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct DistributionSpec {
    label: String,
    distribution: Distribution,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    label: String,
    distribution: Distribution,
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = SynthError;

    fn try_from(raw: RawSpec) -> Result<Self> {
        Self::new(raw.label, raw.distribution)
    }
}

impl DistributionSpec {
    pub fn new(label: impl Into<String>, distribution: Distribution) -> Result<Self> {
        match &distribution {
            Distribution::Single(c) => c.validate()?,
            Distribution::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(SynthError::InvalidSpec("mixture has no components".into()));
                }
                for part in parts {
                    part.component.validate()?;
                    if !(part.weight.is_finite() && part.weight > 0.0) {
                        return Err(SynthError::InvalidSpec(format!(
                            "mixture weight must be positive, got {}",
                            part.weight
                        )));
                    }
                }
                let total: f64 = parts.iter().map(|p| p.weight).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(SynthError::InvalidSpec(format!(
                        "mixture weights sum to {total}, not 1"
                    )));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            distribution,
        })
    }

    pub fn single(label: impl Into<String>, component: Component) -> Result<Self> {
        Self::new(label, Distribution::Single(component))
    }

    pub fn mixture(label: impl Into<String>, parts: &[(f64, Component)]) -> Result<Self> {
        let parts = parts
            .iter()
            .map(|&(weight, component)| WeightedComponent { weight, component })
            .collect();
        Self::new(label, Distribution::Mixture(parts))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn distribution(&self) -> &Distribution {
        &self.distribution
    }

    pub fn is_mixture(&self) -> bool {
        matches!(self.distribution, Distribution::Mixture(_))
    }

    /// Whether negative draws are possible (and therefore rejected).
    pub fn has_negative_mass(&self) -> bool {
        let gaussian = |c: &Component| matches!(c, Component::Gaussian { .. });
        match &self.distribution {
            Distribution::Single(c) => gaussian(c),
            Distribution::Mixture(parts) => parts.iter().any(|p| gaussian(&p.component)),
        }
    }

    /// `P(X > x)` of the untruncated distribution.
    pub fn ccdf(&self, x: f64) -> f64 {
        match &self.distribution {
            Distribution::Single(c) => c.ccdf(x),
            Distribution::Mixture(parts) => parts.iter().map(|p| p.weight * p.component.ccdf(x)).sum(),
        }
    }

    /// Ground-truth quantile at exceedance probability `p`, by whichever
    /// route applies to this distribution.
    pub fn true_quantile(&self, p: f64) -> Result<f64> {
        match self.distribution {
            Distribution::Single(_) => true_quantile_analytic(self, p),
            Distribution::Mixture(_) => true_quantile_bisection(self, p),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(SynthError::InvalidQuery(p))
    }
}

/// Doubles `start` until `ccdf` drops below `p`.
fn bracket_above(ccdf: impl Fn(f64) -> f64, start: f64, p: f64) -> Result<f64> {
    let mut hi = start;
    for _ in 0..MAX_DOUBLINGS {
        if ccdf(hi) < p {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(SynthError::BracketFailure(p))
}

/// Bisection for `f(x) = target` with `f` non-increasing, `f(lo) >= target
/// > f(hi)`. Runs until the bracket stops shrinking in `f64`.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi.abs().max(lo.abs()) {
            break;
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Quantile of a non-mixture distribution.
pub fn true_quantile_analytic(spec: &DistributionSpec, p: f64) -> Result<f64> {
    match &spec.distribution {
        Distribution::Single(c) => c.quantile(p),
        Distribution::Mixture(_) => Err(SynthError::InvalidSpec(format!(
            "{} is a mixture; use the bisection quantile",
            spec.label
        ))),
    }
}

/// Quantile of a mixture: bisection on the weighted CCDF, bracketed from
/// `[0, B]` with `B` doubled until the CCDF falls below `p`.
pub fn true_quantile_bisection(spec: &DistributionSpec, p: f64) -> Result<f64> {
    check_probability(p)?;
    if !spec.is_mixture() {
        return Err(SynthError::InvalidSpec(format!("{} is not a mixture", spec.label)));
    }
    let ccdf = |x: f64| spec.ccdf(x);
    let hi = bracket_above(ccdf, 1.0, p)?;
    let mut lo = 0.0;
    if ccdf(lo) < p {
        // Gaussian components put mass below zero; walk the bracket down.
        lo = -1.0;
        let mut doublings = 0;
        while ccdf(lo) < p {
            lo *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(SynthError::BracketFailure(p));
            }
        }
    }
    Ok(bisect_decreasing(ccdf, lo, hi, p))
}

/// Draws in generation order, before sorting into a [`SampleSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    pub values: Vec<f64>,
    /// Negative draws that were discarded and redrawn.
    pub rejected: u64,
}

/// `n` draws from `spec`, deterministic in `seed`.
pub fn draw(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Draws> {
    if n == 0 {
        return Err(SynthError::EmptySample);
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    let mut rejected = 0;
    while values.len() < n {
        let x = match &spec.distribution {
            Distribution::Single(c) => c.draw(&mut rng),
            Distribution::Mixture(parts) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                // the last component absorbs rounding in the weight sum
                let mut chosen = &parts[parts.len() - 1].component;
                for part in parts {
                    acc += part.weight;
                    if u < acc {
                        chosen = &part.component;
                        break;
                    }
                }
                chosen.draw(&mut rng)
            }
        };
        if x < 0.0 {
            rejected += 1;
        } else {
            values.push(x);
        }
    }
    Ok(Draws { values, rejected })
}

/// `n` i.i.d. draws as a [`SampleSet`].
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<SampleSet> {
    let draws = draw(spec, n, seed)?;
    // draws are finite and non-negative by construction
    Ok(SampleSet::new(draws.values).expect("sampler produced an invalid value"))
}

/// Names of the built-in distributions, in canonical order.
pub const BUILTIN_NAMES: [&str; 12] = [
    "GaussianA", "GaussianB", "WeibullA", "WeibullB", "BetaA", "BetaB", "GammaA", "GammaB",
    "MixtureA", "MixtureB", "MixtureC", "MixtureD",
];

/// The twelve evaluation distributions.
pub fn builtin_specs() -> Vec<DistributionSpec> {
    use Component::*;
    const W: [f64; 3] = [0.6, 0.39, 0.01];
    let gaussians = |means: [f64; 3], sd: f64| {
        [
            (W[0], Gaussian { mean: means[0], sd }),
            (W[1], Gaussian { mean: means[1], sd }),
            (W[2], Gaussian { mean: means[2], sd }),
        ]
    };
    let weibulls = |scales: [f64; 3], shape: f64| {
        [
            (W[0], Weibull { shape, scale: scales[0] }),
            (W[1], Weibull { shape, scale: scales[1] }),
            (W[2], Weibull { shape, scale: scales[2] }),
        ]
    };
    let single = |name, c| DistributionSpec::single(name, c);
    let mixture = |name, parts: [(f64, Component); 3]| DistributionSpec::mixture(name, &parts);
    [
        single("GaussianA", Gaussian { mean: 100.0, sd: 10.0 }),
        single("GaussianB", Gaussian { mean: 100.0, sd: 50.0 }),
        single("WeibullA", Weibull { shape: 4.0, scale: 80.0 }),
        single("WeibullB", Weibull { shape: 8.0, scale: 80.0 }),
        single("BetaA", Beta { alpha: 8.0, beta: 0.25 }),
        single("BetaB", Beta { alpha: 8.0, beta: 0.125 }),
        single("GammaA", Gamma { shape: 100.0, rate: 1.0 }),
        single("GammaB", Gamma { shape: 150.0, rate: 1.0 }),
        mixture("MixtureA", gaussians([5.0, 50.0, 100.0], 10.0)),
        mixture("MixtureB", gaussians([50.0, 100.0, 400.0], 50.0)),
        mixture("MixtureC", weibulls([5.0, 50.0, 100.0], 4.0)),
        mixture("MixtureD", weibulls([5.0, 50.0, 100.0], 8.0)),
    ]
    .into_iter()
    .map(|spec| spec.expect("built-in parameters are valid"))
    .collect()
}

/// Looks up a built-in distribution by its exact name.
pub fn builtin(name: &str) -> Option<DistributionSpec> {
    builtin_specs().into_iter().find(|s| s.label == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn builtin_table() {
        let specs = builtin_specs();
        assert_eq!(specs.len(), 12);
        let names: Vec<&str> = specs.iter().map(|s| s.label()).collect();
        assert_eq!(names, BUILTIN_NAMES);
        assert_eq!(
            builtin("GaussianB").unwrap().distribution(),
            &Distribution::Single(Component::Gaussian { mean: 100.0, sd: 50.0 })
        );
        assert_eq!(
            builtin("BetaB").unwrap().distribution(),
            &Distribution::Single(Component::Beta { alpha: 8.0, beta: 0.125 })
        );
        let Distribution::Mixture(parts) = builtin("MixtureB").unwrap().distribution().clone() else {
            panic!("MixtureB is a mixture");
        };
        let means: Vec<f64> = parts
            .iter()
            .map(|p| match p.component {
                Component::Gaussian { mean, sd } => {
                    assert_eq!(sd, 50.0);
                    mean
                }
                _ => panic!("gaussian components expected"),
            })
            .collect();
        assert_eq!(means, [50.0, 100.0, 400.0]);
        assert_eq!(parts.iter().map(|p| p.weight).collect::<Vec<_>>(), [0.6, 0.39, 0.01]);
        let Distribution::Mixture(parts) = builtin("MixtureC").unwrap().distribution().clone() else {
            panic!("MixtureC is a mixture");
        };
        assert_eq!(parts[2].component, Component::Weibull { shape: 4.0, scale: 100.0 });
        assert!(builtin("GaussianZ").is_none());
    }

    #[test]
    fn spec_validation() {
        let bad = [
            Component::Gaussian { mean: 1.0, sd: 0.0 },
            Component::Weibull { shape: -1.0, scale: 1.0 },
            Component::Beta { alpha: 1.0, beta: f64::NAN },
            Component::Gamma { shape: 1.0, rate: 0.0 },
        ];
        for c in bad {
            assert!(DistributionSpec::single("x", c).is_err());
        }
        let g = Component::Gaussian { mean: 1.0, sd: 1.0 };
        assert!(DistributionSpec::mixture("x", &[(0.5, g), (0.4, g)]).is_err());
        assert!(DistributionSpec::mixture("x", &[(1.5, g), (-0.5, g)]).is_err());
        assert!(DistributionSpec::mixture("x", &[]).is_err());
        assert!(DistributionSpec::mixture("x", &[(1.0, g)]).is_ok());
    }

    #[test]
    fn closed_form_quantiles() {
        let gaussian = builtin("GaussianA").unwrap();
        assert!((gaussian.true_quantile(0.5).unwrap() - 100.0).abs() < 1e-12);
        let weibull = builtin("WeibullA").unwrap();
        assert_eq!(weibull.true_quantile((-1.0f64).exp()).unwrap(), 80.0);
    }

    #[test]
    fn quantile_rejects_bad_probability() {
        for spec in builtin_specs() {
            for p in [0.0, 1.0, -1.0, 2.0, f64::NAN] {
                assert!(matches!(spec.true_quantile(p), Err(SynthError::InvalidQuery(_))));
            }
        }
    }

    #[test]
    fn routes_are_exclusive() {
        let mixture = builtin("MixtureA").unwrap();
        let single = builtin("GammaA").unwrap();
        assert!(true_quantile_analytic(&mixture, 0.1).is_err());
        assert!(true_quantile_bisection(&single, 0.1).is_err());
    }

    #[test]
    fn identical_gaussian_mixture_median() {
        let g = Component::Gaussian { mean: 100.0, sd: 10.0 };
        let spec = DistributionSpec::mixture("twins", &[(0.5, g), (0.5, g)]).unwrap();
        assert!(rel(true_quantile_bisection(&spec, 0.5).unwrap(), 100.0) < 1e-12);
    }

    #[test]
    fn one_component_mixture_matches_analytic() {
        let w = Component::Weibull { shape: 4.0, scale: 80.0 };
        let spec = DistributionSpec::mixture("solo", &[(1.0, w)]).unwrap();
        let p = (-1.0f64).exp();
        assert!((true_quantile_bisection(&spec, p).unwrap() - 80.0).abs() < 1e-8);
    }

    #[test]
    fn mixture_quantile_below_zero() {
        // MixtureA has about 19% of its mass below zero
        let spec = builtin("MixtureA").unwrap();
        let q = spec.true_quantile(0.95).unwrap();
        assert!(q < 0.0);
        assert!(rel(spec.ccdf(q), 0.95) < 1e-12);
    }

    #[test]
    fn beta_gap_resolves_deep_tail() {
        let Distribution::Single(beta) = *builtin("BetaB").unwrap().distribution() else {
            unreachable!()
        };
        for p in [1e-2, 1e-4, 1e-15] {
            let gap = beta.beta_upper_gap(p).unwrap();
            assert!(gap > 0.0);
            assert!(rel(beta.beta_ccdf_at_gap(gap).unwrap(), p) < 1e-10);
        }
        // beyond double resolution the quantile itself rounds to 1
        assert_eq!(beta.quantile(1e-4).unwrap(), 1.0);
    }

    #[test]
    fn draws_are_deterministic() {
        let spec = builtin("MixtureB").unwrap();
        let a = draw(&spec, 1000, 7).unwrap();
        let b = draw(&spec, 1000, 7).unwrap();
        let c = draw(&spec, 1000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
        assert!(a.values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn gaussian_rejections_are_counted() {
        let spec = builtin("GaussianB").unwrap();
        let draws = draw(&spec, 100_000, 3).unwrap();
        // P(X < 0) = Phi(-2) ~ 2.3%
        let rate = draws.rejected as f64 / (draws.rejected as f64 + 100_000.0);
        assert!((rate - 0.02275).abs() < 0.002, "{rate}");
        assert_eq!(draw(&builtin("WeibullA").unwrap(), 1000, 3).unwrap().rejected, 0);
    }

    #[test]
    fn zero_draws_rejected() {
        assert_eq!(sample(&builtin("GammaA").unwrap(), 0, 1), Err(SynthError::EmptySample));
    }
}
