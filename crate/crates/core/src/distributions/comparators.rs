//! Negative binomial, geometric and uniform-Poisson laws used as mixing
//! distribution, nested submodel and competing models.

use super::params::{GeomParams, NbParams, UpParams};
use crate::error::Result;
use crate::specfun::{confluent_1f1, ln_factorial, ln_gamma, SeriesControl};

/// `ln C(r+x-1, x) + r ln p + x ln(1-p)`.
pub(crate) fn ln_nb_pmf(r: f64, p: f64, x: u64) -> f64 {
    let xf = x as f64;
    ln_gamma(r + xf) - ln_gamma(r) - ln_factorial(x) + r * p.ln() + xf * (-p).ln_1p()
}

pub fn nb_ln_pmf(params: &NbParams, x: u64) -> f64 {
    ln_nb_pmf(params.r(), params.p(), x)
}

pub fn nb_pmf(params: &NbParams, x: u64) -> f64 {
    nb_ln_pmf(params, x).exp()
}

/// `P(N <= x)` by summing the PMF with its term ratio `q (r+k) / (k+1)`.
pub fn nb_cdf(params: &NbParams, x: u64) -> f64 {
    let (r, q) = (params.r(), params.q());
    let mut ln_term = r * params.p().ln();
    let mut acc = 0.0;
    for k in 0..=x {
        acc += ln_term.exp();
        let kf = k as f64;
        ln_term += (q * (r + kf) / (kf + 1.0)).ln();
        if ln_term < -745.0 && kf > r * q / params.p() {
            break;
        }
    }
    acc.min(1.0)
}

pub fn geom_ln_pmf(params: &GeomParams, x: u64) -> f64 {
    let p = params.p();
    p.ln() + x as f64 * (-p).ln_1p()
}

pub fn geom_pmf(params: &GeomParams, x: u64) -> f64 {
    geom_ln_pmf(params, x).exp()
}

/// `ln [λ^x e^{-λ} / (x+1)! · ₁F₁(1; x+2; λ)]`.
pub fn up_ln_pmf(params: &UpParams, x: u64) -> Result<f64> {
    up_ln_pmf_with(params, x, &SeriesControl::default())
}

pub fn up_ln_pmf_with(params: &UpParams, x: u64, ctrl: &SeriesControl) -> Result<f64> {
    let lambda = params.lambda();
    let xf = x as f64;
    let f = confluent_1f1(1.0, xf + 2.0, lambda, ctrl)?;
    Ok(xf * lambda.ln() - lambda - ln_factorial(x + 1) + f.ln_abs)
}

pub fn up_pmf(params: &UpParams, x: u64) -> Result<f64> {
    up_ln_pmf(params, x).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn nb_r1_is_geometric() {
        for &p in &[0.2, 0.5, 0.9] {
            let nb = NbParams::new(1.0, p).unwrap();
            for x in 0..10 {
                assert_relative_eq!(nb_pmf(&nb, x), p * (1.0 - p).powi(x as i32), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn nb_matches_direct_product() {
        // C(r+x-1, x) = Π_{j=0}^{x-1} (r + j) / (j + 1)
        let (r, p, x) = (2.5f64, 0.4f64, 3u64);
        let mut coef = 1.0;
        for j in 0..x {
            coef *= (r + j as f64) / (j as f64 + 1.0);
        }
        let direct = coef * p.powf(r) * (1.0 - p).powi(x as i32);
        let nb = NbParams::new(r, p).unwrap();
        assert_relative_eq!(nb_pmf(&nb, x), direct, max_relative = 1e-13);
    }

    #[test]
    fn nb_cdf_is_partial_sum() {
        let nb = NbParams::new(3.3, 0.35).unwrap();
        let partial: f64 = (0..=12).map(|k| nb_pmf(&nb, k)).sum();
        assert_abs_diff_eq!(nb_cdf(&nb, 12), partial, epsilon = 1e-14);
        assert_abs_diff_eq!(nb_cdf(&nb, 2000), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn geometric_value() {
        assert_relative_eq!(geom_pmf(&GeomParams::new(0.5).unwrap(), 2), 0.125);
    }

    #[test]
    fn up_examples() {
        let up = UpParams::new(1.0).unwrap();
        let total: f64 = (0..=100).map(|x| up_pmf(&up, x).unwrap()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);

        // Poisson mixture oracle: p(x) = Σ_{n >= x} e^{-λ} λ^n / n! / (n + 1)
        let lambda = 2.0;
        let up = UpParams::new(lambda).unwrap();
        assert_relative_eq!(
            up_pmf(&up, 0).unwrap(),
            (1.0 - (-lambda).exp()) / lambda,
            max_relative = 1e-13
        );
        for x in [1u64, 4, 9] {
            let mut oracle = 0.0;
            let mut pois = (-lambda).exp();
            for n in 0..200u64 {
                if n >= x {
                    oracle += pois / (n as f64 + 1.0);
                }
                pois *= lambda / (n as f64 + 1.0);
            }
            assert_relative_eq!(up_pmf(&up, x).unwrap(), oracle, max_relative = 1e-12);
        }
    }
}
