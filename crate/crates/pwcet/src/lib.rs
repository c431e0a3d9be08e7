//! Probabilistic WCET estimation toolkit: synthetic ground-truth
//! distributions, the evaluation harness, trace and report formats, and the
//! command-line front end. The estimators themselves live in `pwcet-core`.

pub mod cli;
pub mod harness;
pub mod report;
pub mod synthetic;
pub mod trace;
