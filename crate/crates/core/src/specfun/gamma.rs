//! Log-gamma, digamma and trigamma on the positive real axis.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires x > 0, got {x}")))
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(ln_gamma(x))
}

/// Unchecked `ln Γ(x)`; callers guarantee `x > 0`.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return ln_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// `ln Γ(n + 1)` for a count.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    const SMALL: usize = 32;
    static TABLE: std::sync::OnceLock<[f64; SMALL]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [0.0; SMALL];
        for k in 1..SMALL {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    match table.get(n as usize) {
        Some(v) => *v,
        None => ln_gamma(n as f64 + 1.0),
    }
}

/// ψ(x) = d/dx ln Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    // Bernoulli-number asymptotic tail through x^-14.
    let tail = x2
        * (1.0 / 12.0
            - x2 * (1.0 / 120.0
                - x2 * (1.0 / 252.0
                    - x2 * (1.0 / 240.0
                        - x2 * (1.0 / 132.0 - x2 * (691.0 / 32760.0 - x2 / 12.0))))));
    acc + x.ln() - 0.5 / x - tail
}

/// ψ′(x) for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive(x, "trigamma")?;
    Ok(trigamma_unchecked(x))
}

pub(crate) fn trigamma_unchecked(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let x2 = inv * inv;
    let tail = inv
        + 0.5 * x2
        + inv
            * x2
            * (1.0 / 6.0
                - x2 * (1.0 / 30.0
                    - x2 * (1.0 / 42.0
                        - x2 * (1.0 / 30.0 - x2 * (5.0 / 66.0 - x2 * (691.0 / 2730.0 - x2 * 7.0 / 6.0))))));
    acc + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        assert_abs_diff_eq!(log_gamma(1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(log_gamma(2.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(log_gamma(5.0).unwrap(), 24f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            log_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_non_positive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(digamma(0.0).is_err());
        assert!(trigamma(-2.0).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn digamma_recurrence() {
        for &x in &[0.5, 1.0, 3.7] {
            let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert_abs_diff_eq!(d, 1.0 / x, epsilon = 1e-12);
        }
    }

    #[test]
    fn digamma_matches_log_gamma_difference() {
        for &x in &[1.0, 10.0, 0.3, 47.5] {
            let h = 1e-5;
            let fd = (ln_gamma(x + h) - ln_gamma(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(digamma(x).unwrap(), fd, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(digamma(1.0).unwrap(), -0.577_215_664_901_532_9, epsilon = 1e-12);
    }

    #[test]
    fn trigamma_identities() {
        let d = trigamma(3.0).unwrap() - trigamma(2.0).unwrap();
        assert_abs_diff_eq!(d, -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(
            trigamma(1.0).unwrap(),
            std::f64::consts::PI.powi(2) / 6.0,
            epsilon = 1e-12
        );
        for &x in &[0.01, 0.5, 2.0, 17.0, 1e4] {
            assert!(trigamma(x).unwrap() > 0.0);
            let h = 1e-4 * x.min(1.0);
            let fd = (digamma_unchecked(x + h) - digamma_unchecked(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(trigamma(x).unwrap(), fd, epsilon = 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn ln_factorial_table_matches_gamma() {
        for n in [0u64, 1, 5, 31, 32, 100] {
            assert_abs_diff_eq!(ln_factorial(n), ln_gamma(n as f64 + 1.0), epsilon = 1e-10);
        }
    }
}
