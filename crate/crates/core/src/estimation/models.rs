use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::likelihood::{CountTable, LIKELIHOOD_CONTROL};
use super::mle::fit_mle_table;
use super::{aic, check_level};
use crate::distributions::{
    geom_ln_pmf, nb_ln_pmf, unb_ln_pmf_with, up_ln_pmf_with, GeomParams, NbParams, UnbParams,
    UpParams,
};
use crate::error::{Error, Result};
use crate::optim::{covariance_from_hessian, hessian_from_values, maximize, Objective, OptimOptions};
use crate::specfun::digamma_unchecked;
use crate::stats::two_sided_critical;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountModel {
    Unb,
    Nb,
    Up,
    Geometric,
}

impl CountModel {
    pub fn as_str(self) -> &'static str {
        match self {
            CountModel::Unb => "unb",
            CountModel::Nb => "nb",
            CountModel::Up => "up",
            CountModel::Geometric => "geometric",
        }
    }
}

impl fmt::Display for CountModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unb" => Ok(CountModel::Unb),
            "nb" | "negbin" => Ok(CountModel::Nb),
            "up" => Ok(CountModel::Up),
            "geometric" | "geom" => Ok(CountModel::Geometric),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected unb, nb, up or geometric)"
            ))),
        }
    }
}

/// A fully specified law from any of the supported families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum FittedLaw {
    Unb(UnbParams),
    Nb(NbParams),
    Up(UpParams),
    Geometric(GeomParams),
}

impl FittedLaw {
    pub fn model(&self) -> CountModel {
        match self {
            FittedLaw::Unb(_) => CountModel::Unb,
            FittedLaw::Nb(_) => CountModel::Nb,
            FittedLaw::Up(_) => CountModel::Up,
            FittedLaw::Geometric(_) => CountModel::Geometric,
        }
    }

    pub fn ln_pmf(&self, x: u64) -> Result<f64> {
        match self {
            FittedLaw::Unb(p) => unb_ln_pmf_with(p, x, &LIKELIHOOD_CONTROL),
            FittedLaw::Nb(p) => Ok(nb_ln_pmf(p, x)),
            FittedLaw::Up(p) => up_ln_pmf_with(p, x, &LIKELIHOOD_CONTROL),
            FittedLaw::Geometric(p) => Ok(geom_ln_pmf(p, x)),
        }
    }

    fn loglik(&self, table: &CountTable) -> Result<f64> {
        let mut total = 0.0;
        for &(x, c) in table.entries() {
            total += c * self.ln_pmf(x)?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterEstimate {
    pub name: String,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub conf_interval: Option<(f64, f64)>,
}

/// Covariate-free maximum-likelihood fit of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: CountModel,
    pub law: FittedLaw,
    pub parameters: Vec<ParameterEstimate>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub n: usize,
    pub level: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn fit_model(model: CountModel, data: &[u64], level: f64) -> Result<ModelFit> {
    check_level(level)?;
    let table = CountTable::new(data)?;
    if table.total() == 0.0 {
        return Err(Error::DegenerateData(
            "all observations are zero; the likelihood has no interior maximum".into(),
        ));
    }
    match model {
        CountModel::Unb => {
            let fit = fit_mle_table(&table, None, level)?;
            let names = ["r", "p"];
            let values = [fit.params.r(), fit.params.p()];
            let parameters = (0..2)
                .map(|i| ParameterEstimate {
                    name: names[i].into(),
                    estimate: values[i],
                    std_error: fit.std_errors.map(|s| s[i]),
                    conf_interval: fit.conf_intervals.map(|c| c[i]),
                })
                .collect();
            Ok(ModelFit {
                model,
                law: FittedLaw::Unb(fit.params),
                parameters,
                log_likelihood: fit.log_likelihood,
                aic: fit.aic,
                n: table.n(),
                level,
                converged: fit.converged,
                iterations: fit.iterations,
            })
        }
        CountModel::Geometric => fit_geometric(&table, level),
        CountModel::Nb => fit_nb(&table, level),
        CountModel::Up => fit_up(&table, level),
    }
}

fn fit_geometric(table: &CountTable, level: f64) -> Result<ModelFit> {
    let n = table.n() as f64;
    let p = 1.0 / (1.0 + table.mean());
    let law = FittedLaw::Geometric(GeomParams::new(p)?);
    let log_likelihood = law.loglik(table)?;
    // Observed information n / (p² q) at the closed-form estimate.
    let se = (p * p * (1.0 - p) / n).sqrt();
    let z = two_sided_critical(level);
    Ok(ModelFit {
        model: CountModel::Geometric,
        law,
        parameters: vec![ParameterEstimate {
            name: "p".into(),
            estimate: p,
            std_error: Some(se),
            conf_interval: Some((p - z * se, p + z * se)),
        }],
        log_likelihood,
        aic: aic(log_likelihood, 1),
        n: table.n(),
        level,
        converged: true,
        iterations: 0,
    })
}

struct NbObjective<'a> {
    table: &'a CountTable,
}

impl NbObjective<'_> {
    fn params(theta: &[f64]) -> Result<NbParams> {
        if theta[0].abs() > 25.0 || theta[1].abs() > 35.0 {
            return Err(Error::Domain("parameter search left the admissible box".into()));
        }
        NbParams::new(theta[0].exp(), 1.0 / (1.0 + (-theta[1]).exp()))
    }
}

impl Objective for NbObjective<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, theta: &[f64]) -> Result<f64> {
        FittedLaw::Nb(Self::params(theta)?).loglik(self.table)
    }

    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let params = Self::params(theta)?;
        let (r, p, q) = (params.r(), params.p(), params.q());
        let n = self.table.n() as f64;
        let mut d_r = n * (p.ln() - digamma_unchecked(r));
        for &(x, c) in self.table.entries() {
            d_r += c * digamma_unchecked(r + x as f64);
        }
        let d_p = n * r / p - self.table.total() / q;
        Ok(vec![r * d_r, p * q * d_p])
    }
}

fn fit_nb(table: &CountTable, level: f64) -> Result<ModelFit> {
    let n = table.n() as f64;
    let mean = table.mean();
    let var = table
        .entries()
        .iter()
        .map(|&(x, c)| c * (x as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let r0 = if var > mean { mean * mean / (var - mean) } else { 10.0 };
    let x0 = [r0.ln(), (r0 / mean).ln()];
    let outcome = maximize(&NbObjective { table }, &x0, &OptimOptions::default())?;
    let params = NbObjective::params(&outcome.x)?;
    let natural = [params.r(), params.p()];
    let loglik = |x: &[f64]| FittedLaw::Nb(NbParams::new(x[0], x[1])?).loglik(table);
    let parameters = natural_inference(&["r", "p"], &natural, loglik, level);
    Ok(ModelFit {
        model: CountModel::Nb,
        law: FittedLaw::Nb(params),
        parameters,
        log_likelihood: outcome.value,
        aic: aic(outcome.value, 2),
        n: table.n(),
        level,
        converged: outcome.converged,
        iterations: outcome.iterations,
    })
}

struct UpObjective<'a> {
    table: &'a CountTable,
}

impl Objective for UpObjective<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, theta: &[f64]) -> Result<f64> {
        if theta[0].abs() > 25.0 {
            return Err(Error::Domain("parameter search left the admissible box".into()));
        }
        FittedLaw::Up(UpParams::new(theta[0].exp())?).loglik(self.table)
    }
}

fn fit_up(table: &CountTable, level: f64) -> Result<ModelFit> {
    // The mean of the law is λ/2.
    let x0 = [(2.0 * table.mean()).ln()];
    let outcome = maximize(&UpObjective { table }, &x0, &OptimOptions::default())?;
    let params = UpParams::new(outcome.x[0].exp())?;
    let loglik = |x: &[f64]| FittedLaw::Up(UpParams::new(x[0])?).loglik(table);
    let parameters = natural_inference(&["lambda"], &[params.lambda()], loglik, level);
    Ok(ModelFit {
        model: CountModel::Up,
        law: FittedLaw::Up(params),
        parameters,
        log_likelihood: outcome.value,
        aic: aic(outcome.value, 1),
        n: table.n(),
        level,
        converged: outcome.converged,
        iterations: outcome.iterations,
    })
}

/// Wald summaries from the numerical observed information in natural
/// coordinates; absent when the information is not positive definite.
fn natural_inference(
    names: &[&str],
    values: &[f64],
    loglik: impl Fn(&[f64]) -> Result<f64>,
    level: f64,
) -> Vec<ParameterEstimate> {
    let rel = values.iter().fold(1e-4f64, |acc, v| acc.min(0.25 * v.abs()));
    let cov = hessian_from_values(loglik, values, rel)
        .and_then(|h| covariance_from_hessian(&h))
        .ok();
    let z = two_sided_critical(level);
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let se = cov
                .as_ref()
                .map(|c| c[(i, i)])
                .filter(|v| *v > 0.0)
                .map(f64::sqrt);
            ParameterEstimate {
                name: (*name).into(),
                estimate: values[i],
                std_error: se,
                conf_interval: se.map(|s| (values[i] - z * s, values[i] + z * s)),
            }
        })
        .collect()
}
