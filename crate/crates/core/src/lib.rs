//! Uniform-negative-binomial (UNB) count modelling.
//!
//! A UNB variate is uniform on `{0, ..., N}` where `N` is negative binomial.
//! This crate evaluates the law exactly, estimates it from i.i.d. counts,
//! fits log-link regressions with UNB, NB and uniform-Poisson responses, and
//! compares fitted models.

pub mod datasets;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod optim;
pub mod regression;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
