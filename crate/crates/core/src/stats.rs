//! Reference distributions for test statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::erf::erfc;

/// `P(|Z| >= |z|)` for a standard normal `Z`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Standard normal quantile.
pub fn normal_quantile(prob: f64) -> f64 {
    Normal::standard().inverse_cdf(prob)
}

/// `z_{1 - α/2}` for a two-sided interval at confidence `level = 1 - α`.
pub fn two_sided_critical(level: f64) -> f64 {
    normal_quantile(0.5 + level / 2.0)
}

/// Upper tail `P(X >= x)` of a chi-square with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df)
        .map(|d| d.sf(x))
        .unwrap_or(f64::NAN)
}
