//! Tail bounds `P(X >= b) <= E(g(X / d)^k) / g(b / d)^k` and their envelopes.
//!
//! A [`BoundCurve`] is one member of a family, fixed by `(k, d)`, with its
//! moment precomputed. A [`PwcetCurve`] is the pointwise minimum over every
//! curve that survived the dominance screen ([`restrict_params`]); since each
//! member is a valid upper bound, so is the minimum.
//!
//! All comparisons happen on `ln` of the unclamped bound. Clamping to one is
//! applied only on the way out so small-`b` ordering is not lost to ties.

use alloc::vec::Vec;

use crate::empirical::{LogTransformed, MomentValue, SampleSet};
use crate::error::{Error, Result};
use crate::transform::Family;

/// Default dominance threshold for [`restrict_params`].
pub const DEFAULT_GAMMA: f64 = 0.1;

/// Relative distance below which two inverted times count as a tie.
const TIE_TOLERANCE: f64 = 1e-12;

/// A family together with its exponent `k` and scale divisor `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    family: Family,
    k: f64,
    d: f64,
}

impl BoundParams {
    /// `d` is ignored (stored as 1) for [`Family::PowerK`].
    pub fn new(family: Family, k: f64, d: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter { name: "k", value: k });
        }
        let d = match family {
            Family::PowerK => 1.0,
            _ if d.is_finite() && d > 0.0 => d,
            _ => return Err(Error::InvalidParameter { name: "d", value: d }),
        };
        Ok(Self { family, k, d })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// `count` points from `lo` to `hi`, evenly spaced in log scale. Both ends
/// are returned exactly.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (ln_lo, ln_hi) = (libm::log(lo), libm::log(hi));
            let step = (ln_hi - ln_lo) / (count - 1) as f64;
            let mut points: Vec<f64> = (0..count)
                .map(|i| libm::exp(ln_lo + step * i as f64))
                .collect();
            points[0] = lo;
            points[count - 1] = hi;
            points
        }
    }
}

/// Candidate exponents and divisors searched by the envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    k_values: Vec<f64>,
    d_values: Vec<f64>,
}

impl ParamGrid {
    /// Both lists must be non-empty, strictly increasing and positive.
    pub fn new(k_values: Vec<f64>, d_values: Vec<f64>) -> Result<Self> {
        check_axis(&k_values, "k values must be non-empty, positive and strictly increasing")?;
        check_axis(&d_values, "d values must be non-empty, positive and strictly increasing")?;
        Ok(Self { k_values, d_values })
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d_values
    }

    /// Every parameter pair searched for `family`, `d`-major. The power
    /// family only varies `k`.
    pub fn params(&self, family: Family) -> Vec<BoundParams> {
        let d_values: &[f64] = if family.is_saturating() { &self.d_values } else { &[1.0] };
        let mut params = Vec::with_capacity(d_values.len() * self.k_values.len());
        for &d in d_values {
            for &k in &self.k_values {
                params.push(BoundParams { family, k, d });
            }
        }
        params
    }
}

fn check_axis(values: &[f64], message: &'static str) -> Result<()> {
    let positive = values.iter().all(|v| v.is_finite() && *v > 0.0);
    let increasing = values.windows(2).all(|w| w[0] < w[1]);
    if values.is_empty() || !positive || !increasing {
        return Err(Error::InvalidGrid(message));
    }
    Ok(())
}

/// Grid configuration before it is anchored to a sample.
///
/// `k` defaults to 64 log-spaced points on `[0.25, 256]`. The `d` range
/// defaults to `[median / 100, 100 * max]` of the sample, which spans both
/// the near-linear and the saturated regime of the transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub d_count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            k_min: 0.25,
            k_max: 256.0,
            k_count: 64,
            d_min: None,
            d_max: None,
            d_count: 64,
        }
    }
}

impl GridSpec {
    pub fn resolve(&self, samples: &SampleSet) -> Result<ParamGrid> {
        let (d_lo, d_hi) = default_d_range(samples);
        let d_min = self.d_min.unwrap_or(d_lo);
        let d_max = self.d_max.unwrap_or(d_hi).max(d_min);
        let d_count = if d_min == d_max { 1 } else { self.d_count };
        ParamGrid::new(
            log_space(self.k_min, self.k_max, self.k_count),
            log_space(d_min, d_max, d_count),
        )
    }
}

fn default_d_range(samples: &SampleSet) -> (f64, f64) {
    let max = samples.max();
    if max == 0.0 {
        return (1.0, 1.0);
    }
    let median = samples.median();
    let lo = if median > 0.0 { median / 100.0 } else { max / 1e4 };
    (lo, 100.0 * max)
}

/// Result of inverting a bound at a target probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    /// Smallest execution time whose bound is at most the target.
    Time(f64),
    /// The bound never drops to the target: a saturating transform cannot
    /// certify probabilities below `E(g(X)^k) / (sup g)^k`.
    Unreachable,
}

impl Estimate {
    pub fn time(self) -> Option<f64> {
        match self {
            Estimate::Time(t) => Some(t),
            Estimate::Unreachable => None,
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidQuery { name: "p", value: p })
    }
}

fn check_time(b: f64) -> Result<()> {
    if b.is_finite() && b > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidQuery { name: "b", value: b })
    }
}

/// One bound of a family with its moment precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCurve {
    moment: MomentValue,
}

impl BoundCurve {
    pub fn new(samples: &SampleSet, params: BoundParams) -> Self {
        Self {
            moment: crate::empirical::moment_transformed(samples, params),
        }
    }

    pub fn from_moment(moment: MomentValue) -> Self {
        Self { moment }
    }

    pub fn params(&self) -> BoundParams {
        self.moment.params
    }

    pub fn moment(&self) -> MomentValue {
        self.moment
    }

    /// `ln` of the unclamped bound at `b`; no validation.
    pub fn ln_bound(&self, b: f64) -> f64 {
        let params = self.moment.params;
        if self.moment.log_value == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.moment.log_value - params.k * params.family.ln_base(b, params.d)
    }

    /// `min(1, E(g(X)^k) / g(b)^k)`.
    pub fn eval(&self, b: f64) -> Result<f64> {
        check_time(b)?;
        Ok(libm::exp(self.ln_bound(b)).min(1.0))
    }

    /// Limit of the bound as `b` grows without bound.
    pub fn saturation_floor(&self) -> f64 {
        let params = self.moment.params;
        libm::exp(self.moment.log_value - params.k * libm::log(params.family.supremum()))
    }

    /// Smallest `b` with `eval(b) <= p`.
    pub fn invert(&self, p: f64) -> Result<Estimate> {
        check_probability(p)?;
        let params = self.moment.params;
        if self.moment.log_value == f64::NEG_INFINITY {
            return Ok(Estimate::Time(0.0));
        }
        let level = (self.moment.log_value - libm::log(p)) / params.k;
        Ok(match params.family.inverse_ln_base(level, params.d) {
            Some(b) => Estimate::Time(b),
            None => Estimate::Unreachable,
        })
    }
}

/// Fraction of `sum_i g(x_i)^k` contributed by one copy of the largest
/// observation.
fn max_contribution(transformed: &LogTransformed, moment: &MomentValue, n: usize) -> f64 {
    let ln_sum = moment.log_value + libm::log(n as f64);
    if ln_sum == f64::NEG_INFINITY {
        return 0.0;
    }
    libm::exp(moment.params.k * transformed.ln_max() - ln_sum)
}

/// Moments for every grid point, with the screen's verdict on each.
fn grid_curves(
    samples: &SampleSet,
    grid: &ParamGrid,
    family: Family,
    gamma: f64,
) -> Result<Vec<(BoundCurve, bool)>> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma });
    }
    let d_values: &[f64] = if family.is_saturating() { grid.d_values() } else { &[1.0] };
    let mut curves = Vec::with_capacity(d_values.len() * grid.k_values().len());
    for &d in d_values {
        let transformed = LogTransformed::new(samples, family, d);
        for &k in grid.k_values() {
            let moment = MomentValue {
                log_value: transformed.ln_mean_pow(k),
                params: BoundParams { family, k, d },
            };
            let admitted = max_contribution(&transformed, &moment, samples.count()) <= gamma;
            curves.push((BoundCurve { moment }, admitted));
        }
    }
    Ok(curves)
}

/// Dominance screen: keeps the parameters whose moment is not carried by a
/// single observation. A pair is admitted iff
/// `g(x_max)^k / sum_i g(x_i)^k <= gamma`.
pub fn restrict_params(
    samples: &SampleSet,
    grid: &ParamGrid,
    family: Family,
    gamma: f64,
) -> Result<Vec<BoundParams>> {
    let admitted: Vec<BoundParams> = grid_curves(samples, grid, family, gamma)?
        .into_iter()
        .filter(|(_, ok)| *ok)
        .map(|(curve, _)| curve.params())
        .collect();
    if admitted.is_empty() {
        return Err(Error::EmptyAdmissibleSet);
    }
    Ok(admitted)
}

/// Envelope of the admitted bounds of one family.
pub fn build_pwcet_curve(
    samples: &SampleSet,
    method: Family,
    grid: &ParamGrid,
    gamma: f64,
) -> Result<PwcetCurve> {
    let admitted: Vec<BoundCurve> = grid_curves(samples, grid, method, gamma)?
        .into_iter()
        .filter(|(_, ok)| *ok)
        .map(|(curve, _)| curve)
        .collect();
    if admitted.is_empty() {
        return Err(Error::EmptyAdmissibleSet);
    }
    Ok(PwcetCurve::from_curves(method, admitted, *samples.digest()))
}

/// Like [`build_pwcet_curve`], but when nothing passes the screen the
/// envelope falls back to the smallest `k` of the grid (every `d`), and the
/// curve is flagged with [`PwcetCurve::is_fallback`].
pub fn build_pwcet_curve_or_fallback(
    samples: &SampleSet,
    method: Family,
    grid: &ParamGrid,
    gamma: f64,
) -> Result<PwcetCurve> {
    match build_pwcet_curve(samples, method, grid, gamma) {
        Err(Error::EmptyAdmissibleSet) => {
            let k = grid.k_values()[0];
            let curves = grid
                .params(method)
                .into_iter()
                .filter(|params| params.k == k)
                .map(|params| BoundCurve::new(samples, params))
                .collect();
            let mut curve = PwcetCurve::from_curves(method, curves, *samples.digest());
            curve.fallback = true;
            Ok(curve)
        }
        other => other,
    }
}

/// The estimate at one probability and the parameters that achieved it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcetEstimate {
    pub estimate: Estimate,
    /// `None` only when the estimate is unreachable.
    pub witness: Option<BoundParams>,
}

/// pWCET curve: the lower envelope of the admitted bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PwcetCurve {
    method: Family,
    admitted: Vec<BoundCurve>,
    digest: [u8; 32],
    fallback: bool,
}

impl PwcetCurve {
    /// Packages curves as an envelope. `digest` identifies the sample they
    /// were computed from.
    ///
    /// # Panics
    ///
    /// If `admitted` is empty.
    pub fn from_curves(method: Family, admitted: Vec<BoundCurve>, digest: [u8; 32]) -> Self {
        assert!(!admitted.is_empty(), "an envelope needs at least one bound");
        Self {
            method,
            admitted,
            digest,
            fallback: false,
        }
    }

    pub fn method(&self) -> Family {
        self.method
    }

    pub fn admitted(&self) -> &[BoundCurve] {
        &self.admitted
    }

    pub fn digest(&self) -> &[u8; 32] {
        &self.digest
    }

    /// Whether the screen rejected every parameter and the curve was built
    /// from the fallback set.
    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    /// `ln` of the unclamped envelope at `b`.
    pub fn ln_envelope(&self, b: f64) -> f64 {
        self.admitted
            .iter()
            .map(|curve| curve.ln_bound(b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn envelope(&self, b: f64) -> Result<f64> {
        check_time(b)?;
        Ok(libm::exp(self.ln_envelope(b)).min(1.0))
    }

    /// `inf { b : envelope(b) <= p }`, i.e. the smallest per-curve inverse.
    /// Ties within a relative `1e-12` go to the smallest `k`, then the
    /// smallest `d`.
    pub fn estimate_wcet(&self, p: f64) -> Result<WcetEstimate> {
        check_probability(p)?;
        let mut best: Option<(f64, BoundParams)> = None;
        for curve in &self.admitted {
            let Estimate::Time(b) = curve.invert(p)? else {
                continue;
            };
            let params = curve.params();
            best = match best {
                None => Some((b, params)),
                Some((best_b, best_params)) => {
                    let tie = libm::fabs(b - best_b) <= TIE_TOLERANCE * best_b.max(b);
                    let earlier = (params.k, params.d) < (best_params.k, best_params.d);
                    if (tie && earlier) || (!tie && b < best_b) {
                        Some((b, params))
                    } else {
                        Some((best_b, best_params))
                    }
                }
            };
        }
        Ok(match best {
            Some((b, params)) => WcetEstimate {
                estimate: Estimate::Time(b),
                witness: Some(params),
            },
            None => WcetEstimate {
                estimate: Estimate::Unreachable,
                witness: None,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::load_samples;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn rel(a: f64, b: f64) -> f64 {
        libm::fabs(a - b) / libm::fabs(b)
    }

    fn curve(values: &[f64], family: Family, k: f64, d: f64) -> BoundCurve {
        let samples = load_samples(values).unwrap();
        BoundCurve::new(&samples, BoundParams::new(family, k, d).unwrap())
    }

    #[test]
    fn params_validate() {
        assert!(BoundParams::new(Family::Atan, 0.0, 1.0).is_err());
        assert!(BoundParams::new(Family::Tanh, 1.0, -1.0).is_err());
        assert!(BoundParams::new(Family::Tanh, 1.0, f64::NAN).is_err());
        // d is irrelevant for the power family
        let p = BoundParams::new(Family::PowerK, 2.0, -5.0).unwrap();
        assert_eq!(p.d(), 1.0);
    }

    #[test]
    fn grid_validates() {
        assert!(ParamGrid::new(vec![], vec![1.0]).is_err());
        assert!(ParamGrid::new(vec![2.0, 1.0], vec![1.0]).is_err());
        assert!(ParamGrid::new(vec![1.0, 1.0], vec![1.0]).is_err());
        assert!(ParamGrid::new(vec![1.0], vec![0.0]).is_err());
        let grid = ParamGrid::new(vec![1.0, 2.0], vec![3.0, 4.0, 5.0]).unwrap();
        assert_eq!(grid.params(Family::PowerK).len(), 2);
        assert_eq!(grid.params(Family::Atan).len(), 6);
    }

    #[test]
    fn log_space_endpoints() {
        let pts = log_space(0.25, 256.0, 64);
        assert_eq!(pts.len(), 64);
        assert_eq!(pts[0], 0.25);
        assert_eq!(pts[63], 256.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        let ratio = pts[1] / pts[0];
        assert!(rel(pts[40] / pts[39], ratio) < 1e-12);
    }

    #[test]
    fn default_grid_anchors_on_sample() {
        let s = load_samples(&[1.0, 2.0, 3.0, 10.0]).unwrap();
        let grid = GridSpec::default().resolve(&s).unwrap();
        assert_eq!(grid.k_values().len(), 64);
        assert_eq!(grid.d_values()[0], 2.5 / 100.0);
        assert_eq!(grid.d_values()[63], 1000.0);

        let zeros = load_samples(&[0.0, 0.0]).unwrap();
        assert_eq!(GridSpec::default().resolve(&zeros).unwrap().d_values(), &[1.0]);
    }

    #[test]
    fn eval_examples() {
        let c = 3.0;
        assert!(rel(curve(&[c], Family::PowerK, 1.0, 1.0).eval(2.0 * c).unwrap(), 0.5) < 1e-15);
        let atan = curve(&[1.0, 1.0, 1.0], Family::Atan, 1.0, 1.0);
        assert!(rel(atan.eval(1.0).unwrap(), 1.0) < 1e-15);
        let power = curve(&[1.0, 2.0, 3.0], Family::PowerK, 2.0, 1.0);
        assert!(rel(power.eval(3.0).unwrap(), 14.0 / 27.0) < 1e-14);
    }

    #[test]
    fn eval_clamps_and_validates() {
        let power = curve(&[1.0, 2.0, 3.0], Family::PowerK, 2.0, 1.0);
        assert_eq!(power.eval(0.1).unwrap(), 1.0);
        assert!(power.ln_bound(0.1) > 0.0);
        for b in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(power.eval(b), Err(Error::InvalidQuery { name: "b", .. })));
        }
    }

    #[test]
    fn invert_examples() {
        let power = curve(&[1.0], Family::PowerK, 1.0, 1.0);
        assert_eq!(power.invert(0.5).unwrap(), Estimate::Time(2.0));

        let atan = curve(&[1.0], Family::Atan, 1.0, 1.0);
        assert_eq!(atan.invert(0.5).unwrap(), Estimate::Unreachable);

        let b = atan.invert(0.9).unwrap().time().unwrap();
        assert!(rel(b, libm::tan(FRAC_PI_4 / 0.9)) < 1e-14);
        // pi/4 / 0.9 is 50 degrees
        assert!(rel(b, 1.191_753_592_594_21) < 1e-12);
        assert!(rel(atan.eval(b).unwrap(), 0.9) < 1e-12);
    }

    #[test]
    fn invert_validates_probability() {
        let power = curve(&[1.0], Family::PowerK, 1.0, 1.0);
        for p in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(power.invert(p), Err(Error::InvalidQuery { name: "p", .. })));
        }
    }

    #[test]
    fn saturation_floor_values() {
        let atan = curve(&[1.0], Family::Atan, 2.0, 1.0);
        assert!(rel(atan.saturation_floor(), (FRAC_PI_4 / FRAC_PI_2) * (FRAC_PI_4 / FRAC_PI_2)) < 1e-14);
        let tanh = curve(&[1.0], Family::Tanh, 1.0, 1.0);
        assert!(rel(tanh.saturation_floor(), libm::tanh(1.0)) < 1e-14);
        let power = curve(&[1.0], Family::PowerK, 1.0, 1.0);
        assert_eq!(power.saturation_floor(), 0.0);
    }

    #[test]
    fn all_zero_sample() {
        let zero = curve(&[0.0, 0.0], Family::Atan, 1.0, 1.0);
        assert_eq!(zero.eval(1.0).unwrap(), 0.0);
        assert_eq!(zero.invert(0.1).unwrap(), Estimate::Time(0.0));
    }

    #[test]
    fn restrict_examples() {
        let grid = ParamGrid::new(log_space(0.25, 256.0, 16), vec![0.1, 1.0, 10.0]).unwrap();
        let flat = load_samples(&[1.0; 4]).unwrap();
        assert_eq!(
            restrict_params(&flat, &grid, Family::PowerK, 0.5).unwrap().len(),
            16
        );

        let spiky = load_samples(&[1.0, 1.0, 1.0, 100.0]).unwrap();
        let k4 = ParamGrid::new(vec![4.0], vec![1.0]).unwrap();
        // 1e8 / (3 + 1e8) > 0.5
        assert_eq!(
            restrict_params(&spiky, &k4, Family::PowerK, 0.5),
            Err(Error::EmptyAdmissibleSet)
        );
        // 1 / (3 tanh(1)^4 + 1) ~ 0.49 <= 0.5
        let expected = 1.0 / (3.0 * libm::pow(libm::tanh(1.0), 4.0) + 1.0);
        assert!(expected < 0.5);
        let admitted = restrict_params(&spiky, &k4, Family::Tanh, 0.5).unwrap();
        assert_eq!(admitted.len(), 1);
        assert_eq!(admitted[0].family(), Family::Tanh);
    }

    #[test]
    fn restrict_validates_gamma() {
        let s = load_samples(&[1.0, 2.0]).unwrap();
        let grid = ParamGrid::new(vec![1.0], vec![1.0]).unwrap();
        for gamma in [0.0, 1.5, f64::NAN] {
            assert!(restrict_params(&s, &grid, Family::PowerK, gamma).is_err());
        }
        // gamma = 1 admits everything, even a single observation
        let one = load_samples(&[1.0]).unwrap();
        assert!(restrict_params(&one, &grid, Family::PowerK, 1.0).is_ok());
    }

    #[test]
    fn fallback_uses_smallest_k() {
        let one = load_samples(&[2.0]).unwrap();
        let grid = ParamGrid::new(vec![0.5, 1.0, 2.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(
            build_pwcet_curve(&one, Family::Atan, &grid, 0.5),
            Err(Error::EmptyAdmissibleSet)
        );
        let curve = build_pwcet_curve_or_fallback(&one, Family::Atan, &grid, 0.5).unwrap();
        assert!(curve.is_fallback());
        assert_eq!(curve.admitted().len(), 2);
        assert!(curve.admitted().iter().all(|c| c.params().k() == 0.5));
    }

    #[test]
    fn constant_sample_envelope_uses_largest_k() {
        let c = 2.0;
        let s = load_samples(&[c; 10]).unwrap();
        let grid = ParamGrid::new(vec![1.0, 2.0, 4.0], vec![1.0]).unwrap();
        let env = build_pwcet_curve(&s, Family::PowerK, &grid, 0.5).unwrap();
        for b in [2.5, 3.0, 10.0] {
            let expected = libm::pow(c / b, 4.0);
            assert!(rel(env.envelope(b).unwrap(), expected) < 1e-13);
        }
    }

    #[test]
    fn estimate_examples() {
        let s = load_samples(&[1.0]).unwrap();
        let power = BoundCurve::new(&s, BoundParams::new(Family::PowerK, 1.0, 1.0).unwrap());
        let env = PwcetCurve::from_curves(Family::PowerK, vec![power], *s.digest());
        let est = env.estimate_wcet(0.5).unwrap();
        assert_eq!(est.estimate, Estimate::Time(2.0));
        assert_eq!(est.witness.unwrap().k(), 1.0);

        let atan = BoundCurve::new(&s, BoundParams::new(Family::Atan, 1.0, 1.0).unwrap());
        let env = PwcetCurve::from_curves(Family::Atan, vec![atan], *s.digest());
        let est = env.estimate_wcet(0.4).unwrap();
        assert_eq!(est.estimate, Estimate::Unreachable);
        assert_eq!(est.witness, None);
    }

    #[test]
    fn tie_break_orders_by_k_then_d() {
        // Hand-built moments so that three (k, d) pairs invert to the same b:
        // ln E = k ln g(b*) + ln p.
        let s = load_samples(&[1.0]).unwrap();
        let p = 0.01;
        let target = 5.0;
        let make = |k: f64, d: f64| {
            let params = BoundParams::new(Family::Atan, k, d).unwrap();
            BoundCurve::from_moment(MomentValue {
                log_value: k * Family::Atan.ln_base(target, d) + libm::log(p),
                params,
            })
        };
        let env = PwcetCurve::from_curves(
            Family::Atan,
            vec![make(3.0, 1.0), make(2.0, 7.0), make(2.0, 4.0)],
            *s.digest(),
        );
        let est = env.estimate_wcet(p).unwrap();
        assert!(rel(est.estimate.time().unwrap(), target) < 1e-12);
        let witness = est.witness.unwrap();
        assert_eq!((witness.k(), witness.d()), (2.0, 4.0));
    }
}
