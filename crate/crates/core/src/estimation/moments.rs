use serde::{Deserialize, Serialize};

use super::likelihood::unb_loglik;
use super::{FitMethod, FitResult};
use crate::distributions::UnbParams;
use crate::error::{Error, Result};

/// Raw and central sample moments of a count sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub n: usize,
    pub m1: f64,
    pub m2: f64,
    /// Unbiased (`n - 1`) variance; zero for a single observation.
    pub sample_variance: f64,
    /// `sample_variance / m1`, NaN when `m1 = 0`.
    pub dispersion_index: f64,
    pub zero_proportion: f64,
}

pub fn sample_moments(data: &[u64]) -> Result<MomentSummary> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = data.len();
    let nf = n as f64;
    let (mut s1, mut s2, mut zeros) = (0.0, 0.0, 0usize);
    for &x in data {
        let xf = x as f64;
        s1 += xf;
        s2 += xf * xf;
        if x == 0 {
            zeros += 1;
        }
    }
    let m1 = s1 / nf;
    let m2 = s2 / nf;
    let sample_variance = if n > 1 {
        let ss: f64 = data.iter().map(|&x| (x as f64 - m1).powi(2)).sum();
        ss / (nf - 1.0)
    } else {
        0.0
    };
    let dispersion_index = if m1 > 0.0 { sample_variance / m1 } else { f64::NAN };
    Ok(MomentSummary {
        n,
        m1,
        m2,
        sample_variance,
        dispersion_index,
        zero_proportion: zeros as f64 / nf,
    })
}

/// Solves the two moment equations for `(r, p)` given raw moments.
pub fn moment_estimates(m1: f64, m2: f64) -> Result<UnbParams> {
    if !(m1 > 0.0) {
        return Err(Error::DegenerateData(
            "the first sample moment is zero; the moment equations have no solution".into(),
        ));
    }
    let denominator = 3.0 * (m2 - m1) - 4.0 * m1 * m1;
    if !(denominator > 0.0) {
        return Err(Error::UnderDispersion { denominator });
    }
    let r = 4.0 * m1 * m1 / denominator;
    let p = r / (2.0 * m1 + r);
    UnbParams::new(r, p)
}

/// Method-of-moments fit. Standard errors are not produced.
pub fn fit_mm(data: &[u64]) -> Result<FitResult> {
    let m = sample_moments(data)?;
    let params = moment_estimates(m.m1, m.m2)?;
    let log_likelihood = unb_loglik(&params, data)?;
    Ok(FitResult::without_inference(
        params,
        log_likelihood,
        FitMethod::Moments,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{unb_mean, unb_sample, unb_variance};
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_moments() {
        let m = sample_moments(&[0, 0, 0]).unwrap();
        assert_eq!((m.m1, m.m2, m.zero_proportion), (0.0, 0.0, 1.0));
        assert!(m.dispersion_index.is_nan());

        let m = sample_moments(&[1, 2, 3]).unwrap();
        assert_eq!(m.m1, 2.0);
        assert_abs_diff_eq!(m.m2, 14.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.sample_variance, 1.0, epsilon = 1e-15);
        assert!(m.m2 >= m.m1 * m.m1);

        assert!(matches!(sample_moments(&[]), Err(Error::EmptyData)));
    }

    #[test]
    fn population_moments_invert_exactly() {
        let params = moment_estimates(1.5, 5.5).unwrap();
        assert_abs_diff_eq!(params.r(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(params.p(), 0.5, epsilon = 1e-15);

        for &r in &[0.3, 1.0, 2.0, 7.5, 40.0] {
            for &p in &[0.05, 0.3, 0.5, 0.8, 0.97] {
                let truth = UnbParams::new(r, p).unwrap();
                let m1 = unb_mean(&truth);
                let m2 = unb_variance(&truth) + m1 * m1;
                let est = moment_estimates(m1, m2).unwrap();
                assert_abs_diff_eq!(est.r(), r, epsilon = 1e-12 * r.max(1.0));
                assert_abs_diff_eq!(est.p(), p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inadmissible_moments() {
        assert!(matches!(
            moment_estimates(1.0, 1.0),
            Err(Error::UnderDispersion { denominator }) if denominator == -4.0
        ));
        assert!(matches!(moment_estimates(0.0, 0.0), Err(Error::DegenerateData(_))));
        assert!(fit_mm(&[0, 0, 0]).is_err());
    }

    #[test]
    fn simulated_consistency() {
        let truth = UnbParams::new(2.0, 0.4).unwrap();
        let data = unb_sample(&truth, 200_000, 2024);
        let fit = fit_mm(&data).unwrap();
        assert!((fit.params.r() - 2.0).abs() < 0.15, "r = {}", fit.params.r());
        assert!((fit.params.p() - 0.4).abs() < 0.15, "p = {}", fit.params.p());
        assert!(fit.std_errors.is_none());
        assert_eq!(fit.method, FitMethod::Moments);
    }
}
