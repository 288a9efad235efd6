//! Parameter estimation for an i.i.d. count sample.
//!
//! Method of moments and maximum likelihood for the uniform-negative-binomial
//! law, the likelihood-ratio test against its geometric special case, and
//! covariate-free fits of the comparator laws.

mod likelihood;
mod lrtest;
mod mle;
mod models;
mod moments;

use serde::{Deserialize, Serialize};

use crate::distributions::UnbParams;

pub use likelihood::{
    table_loglik, table_score_p, table_score_r, unb_loglik, unb_score_p, unb_score_r, CountTable,
    ScoreMode,
};
pub(crate) use likelihood::LIKELIHOOD_CONTROL;
pub use lrtest::{lr_test_geometric, LrTestResult};
pub use mle::{fit_mle, fit_mle_table, DEFAULT_LEVEL};
pub use models::{fit_model, CountModel, FittedLaw, ModelFit, ParameterEstimate};
pub use moments::{fit_mm, moment_estimates, sample_moments, MomentSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Moments,
    Mle,
}

/// A fitted `(r, p)` pair with its inferential summary.
///
/// `std_errors`, `cov_matrix` and `conf_intervals` are `None` for the method
/// of moments, and for maximum likelihood when the observed information is
/// not positive definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: UnbParams,
    pub log_likelihood: f64,
    pub std_errors: Option<[f64; 2]>,
    pub cov_matrix: Option<[[f64; 2]; 2]>,
    pub conf_intervals: Option<[(f64, f64); 2]>,
    pub level: f64,
    /// Log-likelihood Hessian in `(r, p)` at the estimate.
    pub hessian: Option<[[f64; 2]; 2]>,
    pub aic: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Gradient norm in `(ln r, logit p)` at termination.
    pub gradient_norm: f64,
    pub method: FitMethod,
}

impl FitResult {
    pub const FREE_PARAMETERS: usize = 2;

    pub(crate) fn without_inference(params: UnbParams, log_likelihood: f64, method: FitMethod) -> Self {
        Self {
            params,
            log_likelihood,
            std_errors: None,
            cov_matrix: None,
            conf_intervals: None,
            level: DEFAULT_LEVEL,
            hessian: None,
            aic: aic(log_likelihood, Self::FREE_PARAMETERS),
            converged: true,
            iterations: 0,
            gradient_norm: f64::NAN,
            method,
        }
    }
}

pub fn aic(log_likelihood: f64, free_parameters: usize) -> f64 {
    -2.0 * log_likelihood + 2.0 * free_parameters as f64
}

pub(crate) fn check_level(level: f64) -> crate::Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )))
    }
}
