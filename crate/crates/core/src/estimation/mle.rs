use super::likelihood::{table_loglik, table_score_p, table_score_r, CountTable, ScoreMode};
use super::moments::moment_estimates;
use super::{aic, check_level, FitMethod, FitResult};
use crate::distributions::UnbParams;
use crate::error::{Error, Result};
use crate::optim::{covariance_from_hessian, hessian_from_values, maximize, Objective, OptimOptions};
use crate::stats::two_sided_critical;

pub const DEFAULT_LEVEL: f64 = 0.95;

const LN_R_BOUND: f64 = 25.0;
const LOGIT_P_BOUND: f64 = 35.0;

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Log-likelihood on `(ln r, logit p)`.
struct Transformed<'a> {
    table: &'a CountTable,
}

impl Transformed<'_> {
    fn params(&self, theta: &[f64]) -> Result<UnbParams> {
        if theta[0].abs() > LN_R_BOUND || theta[1].abs() > LOGIT_P_BOUND {
            return Err(Error::Domain("parameter search left the admissible box".into()));
        }
        UnbParams::new(theta[0].exp(), logistic(theta[1]))
    }
}

impl Objective for Transformed<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, theta: &[f64]) -> Result<f64> {
        table_loglik(&self.params(theta)?, self.table)
    }

    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let params = self.params(theta)?;
        let d_r = table_score_r(&params, self.table, ScoreMode::FiniteDifference)?;
        let d_p = table_score_p(&params, self.table)?;
        Ok(vec![params.r() * d_r, params.p() * params.q() * d_p])
    }
}

/// Maximum-likelihood fit.
///
/// Starts from `init`, else from the moment estimates when they exist, else
/// from `r = 2, p = 1/(1 + mean)`.
pub fn fit_mle(data: &[u64], init: Option<UnbParams>, level: f64) -> Result<FitResult> {
    fit_mle_table(&CountTable::new(data)?, init, level)
}

pub fn fit_mle_table(table: &CountTable, init: Option<UnbParams>, level: f64) -> Result<FitResult> {
    check_level(level)?;
    if table.total() == 0.0 {
        return Err(Error::DegenerateData(
            "all observations are zero; the likelihood has no interior maximum".into(),
        ));
    }
    let start = match init {
        Some(p) => p,
        None => default_start(table)?,
    };
    let objective = Transformed { table };
    let x0 = [start.r().ln(), logit(start.p())];
    let outcome = maximize(&objective, &x0, &OptimOptions::default())?;
    let params = objective.params(&outcome.x)?;

    let mut fit = FitResult::without_inference(params, outcome.value, FitMethod::Mle);
    fit.level = level;
    fit.converged = outcome.converged;
    fit.iterations = outcome.iterations;
    fit.gradient_norm = outcome.gradient_norm();
    fit.aic = aic(outcome.value, FitResult::FREE_PARAMETERS);
    attach_inference(&mut fit, table);
    Ok(fit)
}

fn default_start(table: &CountTable) -> Result<UnbParams> {
    let n = table.n() as f64;
    let m1 = table.mean();
    let m2 = table.entries().iter().map(|&(x, c)| c * (x as f64).powi(2)).sum::<f64>() / n;
    match moment_estimates(m1, m2) {
        Ok(p) if p.r().ln().abs() < LN_R_BOUND && logit(p.p()).abs() < LOGIT_P_BOUND => Ok(p),
        _ => UnbParams::new(2.0, 1.0 / (1.0 + m1)),
    }
}

/// Observed information in `(r, p)` by central differences with steps
/// `1e-4 · max(1, |θ|)`, shrunk to stay inside the parameter space.
fn attach_inference(fit: &mut FitResult, table: &CountTable) {
    let (r, p) = (fit.params.r(), fit.params.p());
    let rel = 1e-4f64.min(0.5 * r).min(0.5 * p).min(0.5 * (1.0 - p));
    let loglik = |x: &[f64]| -> Result<f64> { table_loglik(&UnbParams::new(x[0], x[1])?, table) };
    let Ok(h) = hessian_from_values(loglik, &[r, p], rel) else {
        return;
    };
    fit.hessian = Some([[h[(0, 0)], h[(0, 1)]], [h[(1, 0)], h[(1, 1)]]]);
    let Ok(cov) = covariance_from_hessian(&h) else {
        return;
    };
    if !(cov[(0, 0)] > 0.0 && cov[(1, 1)] > 0.0) {
        return;
    }
    let se = [cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt()];
    let z = two_sided_critical(fit.level);
    let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
    fit.cov_matrix = Some([[cov[(0, 0)], off], [off, cov[(1, 1)]]]);
    fit.std_errors = Some(se);
    fit.conf_intervals = Some([(r - z * se[0], r + z * se[0]), (p - z * se[1], p + z * se[1])]);
}
