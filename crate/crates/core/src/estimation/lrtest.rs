use serde::{Deserialize, Serialize};

use super::likelihood::CountTable;
use super::mle::{fit_mle_table, DEFAULT_LEVEL};
use crate::distributions::UnbParams;
use crate::error::Result;
use crate::stats::chi_square_sf;

/// Deviance test of the geometric special case (`r = 2`) against the full law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrTestResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub restricted_loglik: f64,
    pub full_loglik: f64,
}

/// Geometric log-likelihood at its closed-form MLE `p = 1 / (1 + mean)`.
fn geometric_sup(table: &CountTable) -> f64 {
    let n = table.n() as f64;
    let total = table.total();
    let mean = total / n;
    let p = 1.0 / (1.0 + mean);
    let ln_q = if total > 0.0 { (mean / (1.0 + mean)).ln() } else { 0.0 };
    n * p.ln() + total * ln_q
}

pub fn lr_test_geometric(data: &[u64]) -> Result<LrTestResult> {
    let table = CountTable::new(data)?;
    let restricted_loglik = geometric_sup(&table);
    let mut full = fit_mle_table(&table, None, DEFAULT_LEVEL)?;
    if full.log_likelihood < restricted_loglik {
        // The geometric optimum is itself a point of the full model.
        let start = UnbParams::new(2.0, 1.0 / (1.0 + table.mean()))?;
        let retry = fit_mle_table(&table, Some(start), DEFAULT_LEVEL)?;
        if retry.log_likelihood > full.log_likelihood {
            full = retry;
        }
    }
    let full_loglik = full.log_likelihood.max(restricted_loglik);
    let statistic = 2.0 * (full_loglik - restricted_loglik);
    Ok(LrTestResult {
        statistic,
        df: 1,
        p_value: chi_square_sf(statistic, 1.0),
        restricted_loglik,
        full_loglik,
    })
}
