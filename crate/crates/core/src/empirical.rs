//! Execution-time samples, their empirical CCDF, and transformed moments.
//!
//! Moments are the empirical expectation `E(g(X)^k)` under the measure that
//! puts weight `1/n` on every observation (duplicates keep their
//! multiplicity). They are kept as natural logarithms: `k * ln x` for
//! microsecond-scale values and `k` in the hundreds is far outside the range
//! of `f64`, while the envelope only ever needs log-domain comparisons.

use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::transform::Family;

/// A sorted, validated set of non-negative execution times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    digest: [u8; 32],
}

impl SampleSet {
    /// Validates and sorts `raw`. Order of the input is irrelevant.
    pub fn new(mut raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, value) in raw.iter_mut().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *value < 0.0 {
                return Err(Error::NegativeValue { index, value: *value });
            }
            // folds -0.0 into +0.0 so the digest only depends on the values
            *value += 0.0;
        }
        raw.sort_unstable_by(f64::total_cmp);

        let mut hasher = Sha256::new();
        for value in &raw {
            hasher.update(value.to_le_bytes());
        }
        let digest = hasher.finalize().into();
        Ok(Self { values: raw, digest })
    }

    /// Observations in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn median(&self) -> f64 {
        let n = self.values.len();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }

    /// SHA-256 over the sorted values (little-endian IEEE-754 bytes).
    pub fn digest(&self) -> &[u8; 32] {
        &self.digest
    }

    /// Empirical `P(X >= b)`.
    pub fn exceedance(&self, b: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < b);
        (self.values.len() - below) as f64 / self.values.len() as f64
    }

    /// Largest observation whose empirical exceedance `P(X >= v)` is at
    /// least `p`, i.e. the `ceil(n p)`-th largest value.
    pub fn exceedance_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidQuery { name: "p", value: p });
        }
        let n = self.values.len();
        // n * p is often an integer in exact arithmetic (1e6 * 1e-5); do not
        // let representation error push it to the next rank.
        let rank = libm::ceil(n as f64 * p * (1.0 - 1e-12)).max(1.0) as usize;
        Ok(self.values[n - rank.min(n)])
    }
}

/// Builds a [`SampleSet`] from raw measurements.
pub fn load_samples(raw: &[f64]) -> Result<SampleSet> {
    SampleSet::new(raw.to_vec())
}

/// Exceedance probabilities `P(X >= b)` at every distinct sample value.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCcdf {
    points: Vec<(f64, f64)>,
}

impl EmpiricalCcdf {
    /// `(b, p)` pairs, `b` strictly increasing and `p` non-increasing.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

pub fn empirical_ccdf(samples: &SampleSet) -> EmpiricalCcdf {
    let values = samples.values();
    let n = values.len() as f64;
    let mut points = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if i == 0 || values[i - 1] != v {
            points.push((v, (values.len() - i) as f64 / n));
        }
    }
    EmpiricalCcdf { points }
}

/// `ln E(g(X)^k)` together with the transform that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    /// Natural log of the moment; `-inf` when every term is zero.
    pub log_value: f64,
    pub params: BoundParams,
}

impl MomentValue {
    pub fn value(&self) -> f64 {
        libm::exp(self.log_value)
    }
}

/// `ln E(X^k)`.
pub fn moment_power_k(samples: &SampleSet, k: f64) -> Result<MomentValue> {
    let params = BoundParams::new(Family::PowerK, k, 1.0)?;
    Ok(moment_transformed(samples, params))
}

/// `ln E(g(X / d)^k)` for the family, `k` and `d` in `params`.
pub fn moment_transformed(samples: &SampleSet, params: BoundParams) -> MomentValue {
    let transformed = LogTransformed::new(samples, params.family(), params.d());
    MomentValue {
        log_value: transformed.ln_mean_pow(params.k()),
        params,
    }
}

/// `ln g(x_i / d)` for every sample, ascending. One of these serves every
/// `k` sharing the same family and divisor.
pub(crate) struct LogTransformed {
    ln_values: Vec<f64>,
}

impl LogTransformed {
    pub(crate) fn new(samples: &SampleSet, family: Family, d: f64) -> Self {
        let ln_values = samples
            .values()
            .iter()
            .map(|&x| family.ln_base(x, d))
            .collect();
        Self { ln_values }
    }

    pub(crate) fn ln_max(&self) -> f64 {
        self.ln_values[self.ln_values.len() - 1]
    }

    /// `ln sum_i exp(k * ln_values[i])`.
    ///
    /// Walks from the largest term down and stops once the terms left can
    /// no longer move the sum in the last bit.
    pub(crate) fn ln_sum_pow(&self, k: f64) -> f64 {
        let top = self.ln_max();
        if top == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let mut sum = 0.0;
        let mut compensation = 0.0;
        for (remaining, &u) in self.ln_values.iter().enumerate().rev() {
            let term = libm::exp(k * (u - top));
            // Neumaier summation
            let next = sum + term;
            if libm::fabs(sum) >= libm::fabs(term) {
                compensation += (sum - next) + term;
            } else {
                compensation += (term - next) + sum;
            }
            sum = next;
            if term * remaining as f64 <= sum * TAIL_CUTOFF {
                break;
            }
        }
        k * top + libm::log(sum + compensation)
    }

    pub(crate) fn ln_mean_pow(&self, k: f64) -> f64 {
        self.ln_sum_pow(k) - libm::log(self.ln_values.len() as f64)
    }
}

/// Relative size below which the unvisited tail of a sum is dropped.
const TAIL_CUTOFF: f64 = 1.0 / (1u64 << 60) as f64;
