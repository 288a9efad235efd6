use std::collections::BTreeMap;

use crate::distributions::{unb_ln_pmf_with, UnbParams};
use crate::error::{Error, Result};
use crate::specfun::{
    digamma_unchecked, gauss_2f1, kampe_theta1, SeriesControl, ThetaArgs,
};

/// Truncation policy for likelihood work. Tighter than the default so that
/// series truncation does not show up as noise in finite differences of a
/// log-likelihood summed over tens of thousands of observations.
pub(crate) const LIKELIHOOD_CONTROL: SeriesControl = SeriesControl {
    rel_tol: 1e-17,
    abs_tol: 1e-300,
    max_terms: 200_000,
};

/// A count sample collapsed to `(value, multiplicity)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    entries: Vec<(u64, f64)>,
    n: usize,
}

impl CountTable {
    pub fn new(data: &[u64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyData);
        }
        let mut counts = BTreeMap::new();
        for &x in data {
            *counts.entry(x).or_insert(0usize) += 1;
        }
        Ok(Self {
            entries: counts.into_iter().map(|(x, c)| (x, c as f64)).collect(),
            n: data.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(x, c)| x as f64 * c).sum()
    }

    pub fn mean(&self) -> f64 {
        self.total() / self.n as f64
    }

    pub fn max(&self) -> u64 {
        self.entries.last().map(|e| e.0).unwrap_or(0)
    }
}

/// `Σ ln p(x_i)`.
pub fn unb_loglik(params: &UnbParams, data: &[u64]) -> Result<f64> {
    table_loglik(params, &CountTable::new(data)?)
}

pub fn table_loglik(params: &UnbParams, table: &CountTable) -> Result<f64> {
    let mut total = 0.0;
    for &(x, c) in table.entries() {
        total += c * unb_ln_pmf_with(params, x, &LIKELIHOOD_CONTROL)?;
    }
    Ok(total)
}

/// Analytic `∂ log L / ∂p`.
pub fn unb_score_p(params: &UnbParams, data: &[u64]) -> Result<f64> {
    table_score_p(params, &CountTable::new(data)?)
}

pub fn table_score_p(params: &UnbParams, table: &CountTable) -> Result<f64> {
    let (r, p, q) = (params.r(), params.p(), params.q());
    let n = table.n() as f64;
    let mut score = -table.total() / q + n * r / p;
    for &(x, c) in table.entries() {
        let xf = x as f64;
        let num = gauss_2f1(2.0, r + xf + 1.0, 3.0 + xf, q, &LIKELIHOOD_CONTROL)?;
        let den = gauss_2f1(1.0, r + xf, 2.0 + xf, q, &LIKELIHOOD_CONTROL)?;
        let ratio = num.sign * den.sign * (num.ln_abs - den.ln_abs).exp();
        score -= c * (r + xf) / (2.0 + xf) * ratio;
    }
    Ok(score)
}

/// How [`unb_score_r`] evaluates the derivative in `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreMode {
    /// Central difference of the log-likelihood with step `1e-5 · r`.
    #[default]
    FiniteDifference,
    /// Digamma terms plus the double series for `∂₂F₁/∂b`.
    ThetaSeries,
}

pub fn unb_score_r(params: &UnbParams, data: &[u64], mode: ScoreMode) -> Result<f64> {
    table_score_r(params, &CountTable::new(data)?, mode)
}

pub fn table_score_r(params: &UnbParams, table: &CountTable, mode: ScoreMode) -> Result<f64> {
    match mode {
        ScoreMode::FiniteDifference => score_r_difference(params, table),
        ScoreMode::ThetaSeries => score_r_theta(params, table),
    }
}

fn score_r_difference(params: &UnbParams, table: &CountTable) -> Result<f64> {
    let (r, p) = (params.r(), params.p());
    let h = 1e-5 * r;
    let up = table_loglik(&UnbParams::new(r + h, p)?, table)?;
    let down = table_loglik(&UnbParams::new(r - h, p)?, table)?;
    Ok((up - down) / (2.0 * h))
}

fn score_r_theta(params: &UnbParams, table: &CountTable) -> Result<f64> {
    let (r, p, q) = (params.r(), params.p(), params.q());
    let n = table.n() as f64;
    let mut score = n * (p.ln() - digamma_unchecked(r));
    for &(x, c) in table.entries() {
        let xf = x as f64;
        let f = gauss_2f1(1.0, r + xf, 2.0 + xf, q, &LIKELIHOOD_CONTROL)?;
        let args = ThetaArgs::b_derivative(1.0, r + xf, 2.0 + xf, q);
        let theta = kampe_theta1(&args, &SeriesControl::default())?;
        let ratio = theta.sign * f.sign * (theta.ln_abs - f.ln_abs).exp();
        score += c * (digamma_unchecked(r + xf) + q / (2.0 + xf) * ratio);
    }
    Ok(score)
}
