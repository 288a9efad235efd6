//! Per-observation log-likelihood and its derivative in the linear predictor
//! `η = ln μ` for each response family.

use crate::distributions::{nb_ln_pmf, unb_ln_pmf_with, up_ln_pmf_with, NbParams, UnbParams, UpParams};
use crate::error::{Error, Result};
use crate::estimation::{CountModel, LIKELIHOOD_CONTROL};
use crate::specfun::{confluent_1f1, digamma_unchecked, gauss_2f1};

/// `(ln f, ∂ ln f / ∂η)` at one observation.
pub(crate) fn obs_terms(model: CountModel, eta: f64, r: f64, x: u64, with_derivative: bool) -> Result<(f64, f64)> {
    let mu = eta.exp();
    let xf = x as f64;
    match model {
        CountModel::Unb => {
            let params = UnbParams::from_mean(mu, r)?;
            let ln_f = unb_ln_pmf_with(&params, x, &LIKELIHOOD_CONTROL)?;
            if !with_derivative {
                return Ok((ln_f, 0.0));
            }
            let (p, q) = (params.p(), params.q());
            let num = gauss_2f1(2.0, r + xf + 1.0, 3.0 + xf, q, &LIKELIHOOD_CONTROL)?;
            let den = gauss_2f1(1.0, r + xf, 2.0 + xf, q, &LIKELIHOOD_CONTROL)?;
            let ratio = num.sign * den.sign * (num.ln_abs - den.ln_abs).exp();
            let d = xf * p - r * q + p * q * (r + xf) / (2.0 + xf) * ratio;
            Ok((ln_f, d))
        }
        CountModel::Nb => {
            let params = NbParams::from_mean(mu, r)?;
            let ln_f = nb_ln_pmf(&params, x);
            Ok((ln_f, xf * params.p() - r * params.q()))
        }
        CountModel::Up => {
            let lambda = 2.0 * mu;
            let ln_f = up_ln_pmf_with(&UpParams::new(lambda)?, x, &LIKELIHOOD_CONTROL)?;
            if !with_derivative {
                return Ok((ln_f, 0.0));
            }
            let num = confluent_1f1(2.0, xf + 3.0, lambda, &LIKELIHOOD_CONTROL)?;
            let den = confluent_1f1(1.0, xf + 2.0, lambda, &LIKELIHOOD_CONTROL)?;
            let ratio = (num.ln_abs - den.ln_abs).exp();
            Ok((ln_f, xf - lambda + lambda / (xf + 2.0) * ratio))
        }
        CountModel::Geometric => Err(Error::Config(
            "the geometric law has no regression form; use unb, nb or up".into(),
        )),
    }
}

/// `∂ ln f / ∂r` for the negative binomial with mean held fixed.
pub(crate) fn nb_obs_d_r(eta: f64, r: f64, x: u64) -> Result<f64> {
    let params = NbParams::from_mean(eta.exp(), r)?;
    let xf = x as f64;
    let mu = eta.exp();
    Ok(digamma_unchecked(r + xf) - digamma_unchecked(r) + params.p().ln() + params.q()
        - xf / (mu + r))
}
