use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::design::{Design, RegressionSpec};
use super::family::{nb_obs_d_r, obs_terms};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::estimation::{aic, moment_estimates, sample_moments, CountModel};
use crate::optim::{covariance_from_hessian, hessian_from_gradient, maximize, Objective, OptimOptions};
use crate::stats::{normal_two_sided_p, two_sided_critical};

/// Linear predictors are clamped to this magnitude.
pub const ETA_LIMIT: f64 = 700.0;
/// Per-observation probabilities below this value are floored.
pub const PMF_FLOOR: f64 = 1e-300;

const LN_R_BOUND: f64 = 25.0;

/// Fitted count regression with Wald inference.
///
/// `std_errors` and `conf_intervals` cover the coefficients followed by `r`
/// when the family has one; `wald_t` and `p_values` cover the coefficients.
/// Entries are NaN when the observed information is not positive definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub model: CountModel,
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    pub r: Option<f64>,
    pub std_errors: Vec<f64>,
    pub wald_t: Vec<f64>,
    pub p_values: Vec<f64>,
    pub conf_intervals: Vec<(f64, f64)>,
    pub level: f64,
    pub log_likelihood: f64,
    pub aic: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub diagnostics: Vec<String>,
    /// Fitted `ln f(x_i)` per observation, for non-nested comparisons.
    #[serde(skip)]
    pub ln_pmf: Vec<f64>,
}

impl RegressionFit {
    pub fn free_parameters(&self) -> usize {
        self.beta.len() + usize::from(self.r.is_some())
    }
}

fn has_dispersion(model: CountModel) -> Result<bool> {
    match model {
        CountModel::Unb | CountModel::Nb => Ok(true),
        CountModel::Up => Ok(false),
        CountModel::Geometric => Err(Error::Config(
            "the geometric law has no regression form; use unb, nb or up".into(),
        )),
    }
}

#[derive(Debug, Default)]
struct Evaluation {
    loglik: f64,
    /// `∂ℓ/∂η_i` per observation, when requested.
    d_eta: Vec<f64>,
    ln_pmf: Vec<f64>,
    clamped: usize,
    floored: usize,
}

fn evaluate(
    model: CountModel,
    beta: &[f64],
    r: f64,
    design: &DMatrix<f64>,
    y: &[u64],
    with_derivative: bool,
) -> Result<Evaluation> {
    if design.nrows() != y.len() || design.ncols() != beta.len() {
        return Err(Error::InvalidParameter(format!(
            "design is {}×{}, expected {}×{}",
            design.nrows(),
            design.ncols(),
            y.len(),
            beta.len()
        )));
    }
    let eta = design * nalgebra::DVector::from_column_slice(beta);
    let ln_floor = PMF_FLOOR.ln();
    let mut out = Evaluation {
        d_eta: Vec::with_capacity(if with_derivative { y.len() } else { 0 }),
        ln_pmf: Vec::with_capacity(y.len()),
        ..Default::default()
    };
    for (i, &x) in y.iter().enumerate() {
        let mut e = eta[i];
        let clamped = e.abs() > ETA_LIMIT;
        if clamped {
            e = e.clamp(-ETA_LIMIT, ETA_LIMIT);
            out.clamped += 1;
        }
        let (mut ln_f, mut d) = obs_terms(model, e, r, x, with_derivative)?;
        if clamped {
            d = 0.0;
        }
        if !(ln_f >= ln_floor) {
            ln_f = ln_floor;
            d = 0.0;
            out.floored += 1;
        }
        out.loglik += ln_f;
        out.ln_pmf.push(ln_f);
        if with_derivative {
            out.d_eta.push(d);
        }
    }
    Ok(out)
}

/// Log-likelihood of the UNB regression with `μ_i = exp(x_i·β)` and
/// `p_i = r / (2μ_i + r)`.
pub fn unb_reg_loglik(beta: &[f64], r: f64, design: &DMatrix<f64>, y: &[u64]) -> Result<f64> {
    Ok(evaluate(CountModel::Unb, beta, r, design, y, false)?.loglik)
}

/// Log-likelihood of any supported family; `r` is ignored for `up`.
pub fn reg_loglik(model: CountModel, beta: &[f64], r: f64, design: &DMatrix<f64>, y: &[u64]) -> Result<f64> {
    has_dispersion(model)?;
    Ok(evaluate(model, beta, r, design, y, false)?.loglik)
}

/// Analytic `∂ℓ/∂β` (the normal equations).
pub fn reg_beta_gradient(
    model: CountModel,
    beta: &[f64],
    r: f64,
    design: &DMatrix<f64>,
    y: &[u64],
) -> Result<Vec<f64>> {
    has_dispersion(model)?;
    let ev = evaluate(model, beta, r, design, y, true)?;
    let d = nalgebra::DVector::from_vec(ev.d_eta);
    Ok((design.transpose() * d).as_slice().to_vec())
}

/// Log-likelihood over `θ = (β, ln r)`, or `θ = β` without dispersion.
struct RegObjective<'a> {
    model: CountModel,
    design: &'a Design,
    dispersion: bool,
}

impl RegObjective<'_> {
    fn split<'t>(&self, theta: &'t [f64]) -> Result<(&'t [f64], f64)> {
        if !self.dispersion {
            return Ok((theta, 1.0));
        }
        let k = self.design.k();
        let ln_r = theta[k];
        if ln_r.abs() > LN_R_BOUND {
            return Err(Error::Domain("dispersion left the admissible range".into()));
        }
        Ok((&theta[..k], ln_r.exp()))
    }

    fn loglik(&self, beta: &[f64], r: f64) -> Result<f64> {
        Ok(evaluate(self.model, beta, r, &self.design.matrix, &self.design.y, false)?.loglik)
    }

    fn d_ln_r(&self, beta: &[f64], r: f64) -> Result<f64> {
        match self.model {
            CountModel::Nb => {
                let eta = &self.design.matrix * nalgebra::DVector::from_column_slice(beta);
                let mut total = 0.0;
                for (i, &x) in self.design.y.iter().enumerate() {
                    total += nb_obs_d_r(eta[i].clamp(-ETA_LIMIT, ETA_LIMIT), r, x)?;
                }
                Ok(r * total)
            }
            _ => {
                let h: f64 = 1e-5;
                let up = self.loglik(beta, r * h.exp())?;
                let down = self.loglik(beta, r * (-h).exp())?;
                Ok((up - down) / (2.0 * h))
            }
        }
    }
}

impl Objective for RegObjective<'_> {
    fn dim(&self) -> usize {
        self.design.k() + usize::from(self.dispersion)
    }

    fn value(&self, theta: &[f64]) -> Result<f64> {
        let (beta, r) = self.split(theta)?;
        self.loglik(beta, r)
    }

    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let (beta, r) = self.split(theta)?;
        let mut g = reg_beta_gradient(self.model, beta, r, &self.design.matrix, &self.design.y)?;
        if self.dispersion {
            g.push(self.d_ln_r(beta, r)?);
        }
        Ok(g)
    }
}

fn initial_r(model: CountModel, y: &[u64]) -> f64 {
    let Ok(m) = sample_moments(y) else { return 2.0 };
    match model {
        CountModel::Unb => moment_estimates(m.m1, m.m2).map(|p| p.r()).unwrap_or(2.0),
        _ => {
            let var = m.m2 - m.m1 * m.m1;
            if var > m.m1 && m.m1 > 0.0 {
                m.m1 * m.m1 / (var - m.m1)
            } else {
                2.0
            }
        }
    }
}

pub fn fit_regression(
    model: CountModel,
    dataset: &Dataset,
    spec: &RegressionSpec,
    level: f64,
) -> Result<RegressionFit> {
    fit_regression_design(model, &Design::from_dataset(dataset, spec)?, level)
}

pub fn fit_unb_regression(dataset: &Dataset, spec: &RegressionSpec, level: f64) -> Result<RegressionFit> {
    fit_regression(CountModel::Unb, dataset, spec, level)
}

pub fn fit_nb_regression(dataset: &Dataset, spec: &RegressionSpec, level: f64) -> Result<RegressionFit> {
    fit_regression(CountModel::Nb, dataset, spec, level)
}

pub fn fit_up_regression(dataset: &Dataset, spec: &RegressionSpec, level: f64) -> Result<RegressionFit> {
    fit_regression(CountModel::Up, dataset, spec, level)
}

pub fn fit_regression_design(model: CountModel, design: &Design, level: f64) -> Result<RegressionFit> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let dispersion = has_dispersion(model)?;
    let (n, k) = (design.n(), design.k());
    let free = k + usize::from(dispersion);
    if n <= free {
        return Err(Error::DegenerateData(format!(
            "{n} observations cannot identify {free} parameters"
        )));
    }
    design.check_full_rank()?;
    let total: u64 = design.y.iter().sum();
    if total == 0 {
        return Err(Error::DegenerateData(
            "all responses are zero; the likelihood has no interior maximum".into(),
        ));
    }

    let mean = total as f64 / n as f64;
    let intercept = design
        .matrix
        .column_iter()
        .position(|c| c.iter().all(|&v| v == 1.0));
    let mut x0 = vec![0.0; free];
    if let Some(j) = intercept {
        x0[j] = (mean + 0.5 / n as f64).ln();
    }
    if dispersion {
        x0[k] = initial_r(model, &design.y).ln().clamp(-LN_R_BOUND + 1.0, LN_R_BOUND - 1.0);
    }

    let objective = RegObjective {
        model,
        design,
        dispersion,
    };
    let outcome = maximize(&objective, &x0, &OptimOptions::default())?;
    let (beta, r) = objective.split(&outcome.x)?;
    let beta = beta.to_vec();

    let final_eval = evaluate(model, &beta, r, &design.matrix, &design.y, false)?;
    let mut diagnostics = Vec::new();
    if final_eval.clamped > 0 {
        diagnostics.push(format!(
            "{} linear predictors clamped to |η| <= {ETA_LIMIT}",
            final_eval.clamped
        ));
    }
    if final_eval.floored > 0 {
        diagnostics.push(format!(
            "{} fitted probabilities floored at {PMF_FLOOR:e}",
            final_eval.floored
        ));
    }
    if outcome.used_simplex {
        diagnostics.push("line search failed; simplex fallback used".into());
    }
    if !outcome.converged {
        diagnostics.push(format!(
            "gradient norm {:.3e} above tolerance after {} iterations",
            outcome.gradient_norm(),
            outcome.iterations
        ));
    }

    // Observed information in natural coordinates (β, r).
    let mut natural = beta.clone();
    if dispersion {
        natural.push(r);
    }
    let natural_gradient = |theta: &[f64]| -> Result<Vec<f64>> {
        let mut t = theta.to_vec();
        if dispersion {
            if !(t[k] > 0.0) {
                return Err(Error::Domain("non-positive dispersion".into()));
            }
            t[k] = t[k].ln();
        }
        let mut g = objective.gradient(&t)?;
        if dispersion {
            g[k] /= theta[k];
        }
        Ok(g)
    };
    let rel = if dispersion { 1e-4f64.min(0.25 * r) } else { 1e-4 };
    let std_errors: Vec<f64> = match hessian_from_gradient(natural_gradient, &natural, rel)
        .and_then(|h| covariance_from_hessian(&h))
    {
        Ok(cov) => (0..free)
            .map(|i| if cov[(i, i)] > 0.0 { cov[(i, i)].sqrt() } else { f64::NAN })
            .collect(),
        Err(e) => {
            diagnostics.push(format!("standard errors unavailable: {e}"));
            vec![f64::NAN; free]
        }
    };

    let z = two_sided_critical(level);
    let wald_t: Vec<f64> = beta.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = wald_t.iter().map(|&t| normal_two_sided_p(t)).collect();
    let conf_intervals = natural
        .iter()
        .zip(&std_errors)
        .map(|(v, s)| (v - z * s, v + z * s))
        .collect();

    Ok(RegressionFit {
        model,
        names: design.names.clone(),
        beta,
        r: dispersion.then_some(r),
        std_errors,
        wald_t,
        p_values,
        conf_intervals,
        level,
        log_likelihood: final_eval.loglik,
        aic: aic(final_eval.loglik, free),
        n,
        converged: outcome.converged,
        iterations: outcome.iterations,
        gradient_norm: outcome.gradient_norm(),
        diagnostics,
        ln_pmf: final_eval.ln_pmf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{nb_sample, unb_pmf, unb_sample, NbParams, UnbParams};
    use crate::estimation::{fit_mle, unb_loglik};
    use crate::regression::INTERCEPT_NAME;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn intercept_design(y: Vec<u64>) -> Design {
        let n = y.len();
        Design::new(vec![INTERCEPT_NAME.into()], DMatrix::from_element(n, 1, 1.0), y).unwrap()
    }

    #[test]
    fn loglik_examples() {
        let x = DMatrix::from_element(1, 1, 1.0);
        let ll = unb_reg_loglik(&[1.5f64.ln()], 3.0, &x, &[0]).unwrap();
        assert_abs_diff_eq!(ll, 0.375f64.ln(), epsilon = 1e-14);

        let y = [0u64, 2, 5, 1, 1, 9];
        let mu: f64 = 1.7;
        let x = DMatrix::from_element(y.len(), 1, 1.0);
        let params = UnbParams::from_mean(mu, 0.8).unwrap();
        assert_abs_diff_eq!(
            unb_reg_loglik(&[mu.ln()], 0.8, &x, &y).unwrap(),
            unb_loglik(&params, &y).unwrap(),
            epsilon = 1e-10
        );
    }

    fn synthetic_design(n: usize, seed: u64) -> (DMatrix<f64>, Vec<u64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, 3, |_, j| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) });
        let y = (0..n).map(|_| rng.random_range(0..8u64)).collect();
        (x, y)
    }

    #[test]
    fn beta_gradient_matches_differences() {
        let (x, y) = synthetic_design(50, 1);
        let beta = [0.3, -0.4, 0.8];
        for (model, r) in [(CountModel::Unb, 1.3), (CountModel::Unb, 4.0), (CountModel::Nb, 0.7), (CountModel::Up, 1.0)] {
            let g = reg_beta_gradient(model, &beta, r, &x, &y).unwrap();
            for j in 0..3 {
                let h = 1e-6;
                let mut b = beta;
                b[j] += h;
                let up = reg_loglik(model, &b, r, &x, &y).unwrap();
                b[j] -= 2.0 * h;
                let down = reg_loglik(model, &b, r, &x, &y).unwrap();
                assert_abs_diff_eq!(g[j], (up - down) / (2.0 * h), epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn nb_dispersion_derivative_matches_difference() {
        let (x, y) = synthetic_design(50, 2);
        let design = Design::new(vec!["a".into(), "b".into(), "c".into()], x, y).unwrap();
        let obj = RegObjective { model: CountModel::Nb, design: &design, dispersion: true };
        let beta = [0.2, 0.1, -0.3];
        let r: f64 = 1.7;
        let h: f64 = 1e-6;
        let fd = (obj.loglik(&beta, r * h.exp()).unwrap() - obj.loglik(&beta, r * (-h).exp()).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(obj.d_ln_r(&beta, r).unwrap(), fd, epsilon = 1e-5);
    }

    #[test]
    fn intercept_only_matches_distribution_fit() {
        let y = unb_sample(&UnbParams::new(2.0, 0.45).unwrap(), 3000, 21);
        let reg = fit_regression_design(CountModel::Unb, &intercept_design(y.clone()), 0.95).unwrap();
        let dist = fit_mle(&y, None, 0.95).unwrap();
        assert!(reg.converged, "{:?}", reg.diagnostics);
        assert_abs_diff_eq!(reg.log_likelihood, dist.log_likelihood, epsilon = 1e-6);
        let r = reg.r.unwrap();
        let p = r / (2.0 * reg.beta[0].exp() + r);
        assert_abs_diff_eq!(r, dist.params.r(), epsilon = 1e-4);
        assert_abs_diff_eq!(p, dist.params.p(), epsilon = 1e-5);
    }

    #[test]
    fn intercept_only_mean_conditions() {
        let y = nb_sample(&NbParams::new(1.2, 0.4).unwrap(), 4000, 5);
        let mean = y.iter().sum::<u64>() as f64 / y.len() as f64;
        let nb = fit_regression_design(CountModel::Nb, &intercept_design(y.clone()), 0.95).unwrap();
        assert_abs_diff_eq!(nb.beta[0].exp(), mean, epsilon = 1e-6);
        let up = fit_regression_design(CountModel::Up, &intercept_design(y), 0.95).unwrap();
        assert!(up.r.is_none());
        assert_eq!(up.std_errors.len(), 1);
        assert_abs_diff_eq!(up.aic, -2.0 * up.log_likelihood + 2.0, epsilon = 1e-9);
    }

    #[test]
    fn wald_identity_and_pmf_vector() {
        let (x, _) = synthetic_design(400, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let beta_true = [0.2, 0.5, -0.7];
        let y: Vec<u64> = (0..400)
            .map(|i| {
                let mu = (beta_true[0] + beta_true[1] * x[(i, 1)] + beta_true[2] * x[(i, 2)]).exp();
                let params = UnbParams::from_mean(mu, 1.5).unwrap();
                unb_sample(&params, 1, rng.random())[0]
            })
            .collect();
        let design = Design::new(vec!["c".into(), "a".into(), "b".into()], x, y.clone()).unwrap();
        let fit = fit_regression_design(CountModel::Unb, &design, 0.95).unwrap();
        assert!(fit.converged, "{:?}", fit.diagnostics);
        for k in 0..3 {
            assert_eq!(fit.wald_t[k], fit.beta[k] / fit.std_errors[k]);
            assert!((0.0..=1.0).contains(&fit.p_values[k]));
        }
        assert_eq!(fit.std_errors.len(), 4);
        assert_abs_diff_eq!(fit.aic, -2.0 * fit.log_likelihood + 8.0, epsilon = 1e-9);

        let r = fit.r.unwrap();
        let eta = &design.matrix * nalgebra::DVector::from_column_slice(&fit.beta);
        for i in [0usize, 17, 399] {
            let params = UnbParams::from_mean(eta[i].exp(), r).unwrap();
            assert_abs_diff_eq!(fit.ln_pmf[i], unb_pmf(&params, y[i]).unwrap().ln(), epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_designs() {
        let d = Dataset::new(vec![
            ("y".into(), vec![0.0, 1.0, 2.0, 0.0, 3.0]),
            ("one".into(), vec![1.0; 5]),
        ])
        .unwrap();
        assert!(matches!(
            fit_unb_regression(&d, &RegressionSpec::new("y", &["one"]), 0.95),
            Err(Error::RankDeficient { .. })
        ));
        assert!(fit_regression(CountModel::Geometric, &d, &RegressionSpec::new("y", &[]), 0.95).is_err());
        let tiny = Dataset::new(vec![("y".into(), vec![0.0, 1.0])]).unwrap();
        assert!(matches!(
            fit_unb_regression(&tiny, &RegressionSpec::new("y", &[]), 0.95),
            Err(Error::DegenerateData(_))
        ));
    }
}
