//! Inequality-based probabilistic WCET bounds.
//!
//! Given non-negative execution-time observations, this crate builds upper
//! bounds on the exceedance probability `P(X >= b)` of the form
//! `E(f(X)^k) / f(b)^k` for a non-negative, monotonically increasing `f`,
//! and takes the lower envelope over a grid of parameters:
//!
//! * [`Family::PowerK`]: `f(x) = x` (the MEMIK envelope),
//! * [`Family::Atan`]: `f(x) = arctan(x / d)`,
//! * [`Family::Tanh`]: `f(x) = tanh(x / d)`.
//!
//! The saturating families damp the influence of rare extreme observations
//! on the moment, which keeps the envelope tight on heavy-tailed samples.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, synthetic
//! distributions and the command line live in the `pwcet` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod empirical;
mod error;
pub mod transform;

pub use bounds::{
    build_pwcet_curve, build_pwcet_curve_or_fallback, restrict_params, BoundCurve, BoundParams,
    Estimate, GridSpec, ParamGrid, PwcetCurve, WcetEstimate, DEFAULT_GAMMA,
};
pub use empirical::{
    empirical_ccdf, load_samples, moment_power_k, moment_transformed, EmpiricalCcdf, MomentValue,
    SampleSet,
};
pub use error::{Error, Result};
pub use transform::Family;
