//! The uniform-negative-binomial law.
//!
//! `p(x) = q^x p^r / (1 + x) · C(r+x-1, x) · ₂F₁(1, r+x; 2+x; q)`, evaluated in
//! log space. The hypergeometric factor is summed directly for `q <= 0.75`,
//! through the Euler transformation `p^(1-r) ₂F₁(1+x, 2-r; 2+x; q)` for
//! `q > 0.75, r < 2`, and otherwise replaced by the subtractive recurrence
//! `p(x+1) = p(x) - NB(x; r, p) / (x + 1)` started from the closed-form `p(0)`.

use super::comparators::{ln_nb_pmf, nb_cdf};
#[cfg(test)]
use super::comparators::nb_ln_pmf;
use super::params::UnbParams;
use crate::error::{Error, Result};
use crate::specfun::{
    gauss_2f1, gauss_2f1_with, ln_factorial, ln_gamma, Hyp2f1Method, SeriesControl, SeriesSum,
    EULER_THRESHOLD,
};

/// Forward subtraction is abandoned once `p(x)` falls below this fraction of
/// `p(0)`; past that point the subtraction has lost half of the significant
/// digits and the tail is summed directly instead.
pub const RECURRENCE_FLOOR: f64 = 1e-8;

/// How [`unb_ln_pmf`] evaluates the hypergeometric factor for given parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfRoute {
    Direct,
    Euler,
    Recurrence,
}

pub fn pmf_route(params: &UnbParams) -> PmfRoute {
    if params.q() <= EULER_THRESHOLD {
        PmfRoute::Direct
    } else if params.r() < 2.0 {
        PmfRoute::Euler
    } else {
        PmfRoute::Recurrence
    }
}

/// `ln p(x)` without the hypergeometric factor:
/// `x ln q + r ln p - ln(1+x) + ln Γ(r+x) - ln Γ(r) - ln x!`.
fn ln_prefactor(params: &UnbParams, x: u64) -> f64 {
    let (r, p) = (params.r(), params.p());
    let xf = x as f64;
    xf * (-p).ln_1p() + r * p.ln() - xf.ln_1p() + ln_gamma(r + xf) - ln_gamma(r) - ln_factorial(x)
}

/// `ln ₂F₁(1, r+x; 2+x; q)` via the direct or Euler series.
pub fn ln_pmf_hypergeometric(params: &UnbParams, x: u64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    let (r, q) = (params.r(), params.q());
    let xf = x as f64;
    let method = if q > EULER_THRESHOLD && r < 2.0 {
        Hyp2f1Method::Euler
    } else {
        Hyp2f1Method::Direct
    };
    gauss_2f1_with(1.0, r + xf, 2.0 + xf, q, method, ctrl)
}

/// `ln p(x)` always through the hypergeometric series, never the recurrence.
pub fn unb_ln_pmf_series(params: &UnbParams, x: u64, ctrl: &SeriesControl) -> Result<f64> {
    let f = ln_pmf_hypergeometric(params, x, ctrl)?;
    Ok(ln_prefactor(params, x) + f.ln_abs)
}

pub fn unb_pmf_series(params: &UnbParams, x: u64, ctrl: &SeriesControl) -> Result<f64> {
    unb_ln_pmf_series(params, x, ctrl).map(f64::exp)
}

/// `ln p(x)`, dispatching on [`pmf_route`].
pub fn unb_ln_pmf(params: &UnbParams, x: u64) -> Result<f64> {
    unb_ln_pmf_with(params, x, &SeriesControl::default())
}

/// [`unb_ln_pmf`] with an explicit truncation policy.
pub fn unb_ln_pmf_with(params: &UnbParams, x: u64, ctrl: &SeriesControl) -> Result<f64> {
    match pmf_route(params) {
        PmfRoute::Direct | PmfRoute::Euler => unb_ln_pmf_series(params, x, ctrl),
        PmfRoute::Recurrence => ln_pmf_by_recurrence(params, x, ctrl),
    }
}

pub fn unb_pmf(params: &UnbParams, x: u64) -> Result<f64> {
    unb_ln_pmf(params, x).map(f64::exp)
}

fn ln_pmf_by_recurrence(params: &UnbParams, x: u64, ctrl: &SeriesControl) -> Result<f64> {
    let p0 = unb_p0(params);
    let mut px = p0;
    let (r, q) = (params.r(), params.q());
    let mut ln_nb = r * params.p().ln();
    for k in 0..x {
        let kf = k as f64;
        px -= (ln_nb - (kf + 1.0).ln()).exp();
        if px < RECURRENCE_FLOOR * p0 {
            return tail_ln_sum(params, x, ctrl);
        }
        ln_nb += (q * (r + kf) / (kf + 1.0)).ln();
    }
    Ok(px.ln())
}

/// `ln Σ_{k >= x} NB(k; r, p) / (k + 1)`, i.e. `ln p(x)` from the mixture
/// definition.
fn tail_ln_sum(params: &UnbParams, x: u64, ctrl: &SeriesControl) -> Result<f64> {
    let (r, q) = (params.r(), params.q());
    let xf = x as f64;
    let first = ln_nb_pmf(r, params.p(), x) - xf.ln_1p();
    let sum = crate::specfun::sum_by_ratio(ctrl, "unb tail sum", first, 1.0, |n| {
        let k = xf + n as f64;
        q * (r + k) / (k + 2.0)
    })?;
    Ok(sum.ln_abs)
}

/// Closed-form `p(0) = (p - p^r) / ((1 - p)(r - 1))`, with the `r = 1` limit
/// `-p ln p / (1 - p)`.
pub fn unb_p0(params: &UnbParams) -> f64 {
    let (r, p, q) = (params.r(), params.p(), params.q());
    let ln_p = p.ln();
    let u = r - 1.0;
    // (1 - p^(r-1)) / (r - 1) = -expm1(u ln p) / u, which tends to -ln p as u -> 0.
    let ratio = if u == 0.0 { -ln_p } else { -(u * ln_p).exp_m1() / u };
    p * ratio / q
}

/// `p(0), ..., p(x_max)` by the subtractive recurrence.
///
/// Once forward subtraction reaches [`RECURRENCE_FLOOR`] the remaining
/// entries are rebuilt backwards from a directly summed tail, using the same
/// recurrence read as `p(x) = p(x+1) + NB(x) / (x + 1)`.
pub fn unb_pmf_vector(params: &UnbParams, x_max: u64) -> Result<Vec<f64>> {
    let (r, q) = (params.r(), params.q());
    let len = x_max as usize + 1;
    let mut out = Vec::with_capacity(len);
    let p0 = unb_p0(params);
    out.push(p0);

    // nb_term[k] = NB(k) / (k + 1)
    let mut ln_nb = r * params.p().ln();
    let mut nb_terms = Vec::with_capacity(len);
    for k in 0..len {
        let kf = k as f64;
        nb_terms.push((ln_nb - kf.ln_1p()).exp());
        ln_nb += (q * (r + kf) / (kf + 1.0)).ln();
    }

    let mut crossover = None;
    for k in 0..x_max as usize {
        let next = out[k] - nb_terms[k];
        if next < RECURRENCE_FLOOR * p0 {
            crossover = Some(k + 1);
            break;
        }
        out.push(next);
    }

    if let Some(start) = crossover {
        let ctrl = SeriesControl::default();
        let mut tail = vec![0.0; len - start];
        let last = tail.len() - 1;
        tail[last] = tail_ln_sum(params, x_max, &ctrl)?.exp();
        for i in (0..last).rev() {
            tail[i] = tail[i + 1] + nb_terms[start + i];
        }
        out.extend(tail);
    }
    Ok(out)
}

/// `p(x+1) / p(x) = q (r+x)/(x+2) · ₂F₁(1, r+x+1; 3+x; q) / ₂F₁(1, r+x; 2+x; q)`.
pub fn unb_pmf_ratio(params: &UnbParams, x: u64) -> Result<f64> {
    let ctrl = SeriesControl::default();
    let (r, q) = (params.r(), params.q());
    let xf = x as f64;
    let upper = ln_pmf_hypergeometric(params, x + 1, &ctrl)?;
    let lower = ln_pmf_hypergeometric(params, x, &ctrl)?;
    Ok(q * (r + xf) / (xf + 2.0) * (upper.ln_abs - lower.ln_abs).exp())
}

/// `F(x) = F_NB(x) + (r+x)/(x+2) · C(r+x-1, x) p^r q^(x+1) ₂F₁(1, r+x+1; x+3; q)`.
pub fn unb_cdf(params: &UnbParams, x: u64) -> Result<f64> {
    let ctrl = SeriesControl::default();
    let (r, p, q) = (params.r(), params.p(), params.q());
    let xf = x as f64;
    let f = gauss_2f1(1.0, r + xf + 1.0, xf + 3.0, q, &ctrl)?;
    let ln_tail = (r + xf).ln() - (xf + 2.0).ln() + ln_gamma(r + xf) - ln_gamma(r) - ln_factorial(x)
        + r * p.ln()
        + (xf + 1.0) * q.ln()
        + f.ln_abs;
    let base = nb_cdf(&params.mixing(), x);
    Ok((base + ln_tail.exp()).min(1.0))
}

pub fn unb_mean(params: &UnbParams) -> f64 {
    params.r() * params.q() / (2.0 * params.p())
}

pub fn unb_variance(params: &UnbParams) -> f64 {
    let (r, p, q) = (params.r(), params.p(), params.q());
    r * q / (12.0 * p) * (6.0 + 4.0 * q / p + r * q / p)
}

pub fn unb_dispersion_index(params: &UnbParams) -> f64 {
    let (r, p, q) = (params.r(), params.p(), params.q());
    1.0 + 4.0 * q / (6.0 * p) + r * q / (6.0 * p)
}

/// `expm1(u L) / u`, continuous through `u = 0`.
fn expm1_ratio(u: f64, l: f64) -> f64 {
    if u == 0.0 {
        l
    } else {
        (u * l).exp_m1() / u
    }
}

/// `E[w^X]` for `w = e^t` or `w = s`, given `w - 1`. Closed form
/// `p^r [(1 - q w)^(1-r) - p^(1-r)] / ((r - 1) q (w - 1))`.
fn generating_function(params: &UnbParams, w: f64, w_minus_one: f64) -> Result<f64> {
    let (r, p, q) = (params.r(), params.p(), params.q());
    if w_minus_one.abs() < 1e-6 {
        return generating_series(params, w);
    }
    // (1 - q w) / p = 1 - q (w - 1) / p
    let l = (-q * w_minus_one / p).ln_1p();
    let u = 1.0 - r;
    Ok(-p * expm1_ratio(u, l) / (q * w_minus_one))
}

/// `Σ w^x p(x)` summed over the PMF until the mixing tail is negligible.
fn generating_series(params: &UnbParams, w: f64) -> Result<f64> {
    let x_max = super::nb_tail_cutoff(&params.mixing(), 1e-17);
    let pmf = unb_pmf_vector(params, x_max)?;
    let mut acc = 0.0;
    let mut wk = 1.0;
    for v in pmf {
        acc += wk * v;
        wk *= w;
    }
    Ok(acc)
}

/// Moment generating function, defined for `t < -ln q`.
pub fn unb_mgf(params: &UnbParams, t: f64) -> Result<f64> {
    let limit = -params.q().ln();
    if !(t < limit) {
        return Err(Error::Domain(format!("MGF requires t < -ln q = {limit}, got {t}")));
    }
    generating_function(params, t.exp(), t.exp_m1())
}

/// Probability generating function, defined for `|s| < 1 / q`.
pub fn unb_pgf(params: &UnbParams, s: f64) -> Result<f64> {
    let limit = 1.0 / params.q();
    if !(s.abs() < limit) {
        return Err(Error::Domain(format!("PGF requires |s| < 1/q = {limit}, got {s}")));
    }
    generating_function(params, s, s - 1.0)
}
