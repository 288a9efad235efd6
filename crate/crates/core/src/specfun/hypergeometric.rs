//! Gauss ₂F₁, Kummer ₁F₁ and the s = 1 Hurwitz–Lerch Φ as term-ratio series.

use super::series::{is_non_positive_integer, sum_by_ratio, SeriesControl, SeriesSum};
use crate::error::{Error, Result};

/// Evaluation route for [`gauss_2f1_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyp2f1Method {
    /// Direct series, switching to the Euler transformation for `z > 0.75`
    /// when the transformed series decays faster.
    Auto,
    Direct,
    /// `(1 - z)^(c-a-b) ₂F₁(c-a, c-b; c; z)`.
    Euler,
}

/// Threshold above which [`Hyp2f1Method::Auto`] considers the Euler form.
pub const EULER_THRESHOLD: f64 = 0.75;

fn check_2f1(c: f64, z: f64) -> Result<()> {
    if !z.is_finite() || z.abs() >= 1.0 {
        return Err(Error::Domain(format!("2F1 requires |z| < 1, got z = {z}")));
    }
    if is_non_positive_integer(c) {
        return Err(Error::Domain(format!(
            "2F1 requires c not a non-positive integer, got c = {c}"
        )));
    }
    Ok(())
}

/// ₂F₁(a, b; c; z) for real parameters and `|z| < 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    gauss_2f1_with(a, b, c, z, Hyp2f1Method::Auto, ctrl)
}

pub fn gauss_2f1_with(
    a: f64,
    b: f64,
    c: f64,
    z: f64,
    method: Hyp2f1Method,
    ctrl: &SeriesControl,
) -> Result<SeriesSum> {
    check_2f1(c, z)?;
    let use_euler = match method {
        Hyp2f1Method::Direct => false,
        Hyp2f1Method::Euler => true,
        Hyp2f1Method::Auto => z > EULER_THRESHOLD && euler_is_faster(a, b, c),
    };
    if use_euler {
        let ln_prefactor = (c - a - b) * (-z).ln_1p();
        Ok(direct_2f1(c - a, c - b, c, z, ctrl)?.scaled(ln_prefactor))
    } else {
        direct_2f1(a, b, c, z, ctrl)
    }
}

/// Terms of the direct series behave like `n^(a+b-c-1) z^n`, those of the
/// Euler form like `n^(c-a-b-1) z^n`. Only same-sign transformed series are
/// accepted so the prefactor never multiplies a cancelling sum; that includes
/// terminating ones, whose alternating coefficients cancel just as badly.
fn euler_is_faster(a: f64, b: f64, c: f64) -> bool {
    a + b > c && c - a > 0.0 && c - b > 0.0
}

fn direct_2f1(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    sum_by_ratio(ctrl, "gauss_2f1", 0.0, 1.0, |n| {
        let n = n as f64;
        (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
    })
}

/// Kummer ₁F₁(a; c; z).
pub fn confluent_1f1(a: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    if is_non_positive_integer(c) {
        return Err(Error::Domain(format!(
            "1F1 requires c not a non-positive integer, got c = {c}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("1F1 requires finite z, got {z}")));
    }
    sum_by_ratio(ctrl, "confluent_1f1", 0.0, 1.0, |n| {
        let n = n as f64;
        (a + n) / ((c + n) * (n + 1.0)) * z
    })
}

/// Hurwitz–Lerch Φ(z, 1, a) = Σ z^k / (k + a) for `|z| < 1`, `a > 0`.
pub fn lerch_phi(z: f64, a: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    if !z.is_finite() || z.abs() >= 1.0 {
        return Err(Error::Domain(format!("lerch_phi requires |z| < 1, got {z}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("lerch_phi requires a > 0, got {a}")));
    }
    sum_by_ratio(ctrl, "lerch_phi", -a.ln(), 1.0, |k| {
        let k = k as f64;
        z * (k + a) / (k + 1.0 + a)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    /// Plain summation in f64 with a fixed, generous number of terms.
    fn naive_2f1(a: f64, b: f64, c: f64, z: f64, terms: usize) -> f64 {
        let mut t = 1.0;
        let mut s = 1.0;
        for n in 0..terms {
            let n = n as f64;
            t *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
            s += t;
        }
        s
    }

    #[test]
    fn zero_argument_is_one() {
        let v = gauss_2f1(1.3, -2.2, 0.7, 0.0, &ctrl()).unwrap();
        assert_eq!(v.value(), 1.0);
        assert_eq!(confluent_1f1(2.0, 3.0, 0.0, &ctrl()).unwrap().value(), 1.0);
    }

    #[test]
    fn geometric_reduction() {
        let v = gauss_2f1(1.0, 3.5, 3.5, 0.5, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn log_closed_form() {
        let oracle = naive_2f1(1.0, 1.0, 2.0, 0.5, 200);
        let v = gauss_2f1(1.0, 1.0, 2.0, 0.5, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), oracle, max_relative = 1e-14);
        assert_relative_eq!(v.value(), 2.0 * 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn euler_matches_direct_near_one() {
        for &(a, b, c, z) in &[(1.0, 2.5, 3.0, 0.9), (2.0, 3.2, 4.0, 0.8), (1.0, 1.7, 2.0, 0.95)] {
            let d = gauss_2f1_with(a, b, c, z, Hyp2f1Method::Direct, &ctrl()).unwrap();
            let e = gauss_2f1_with(a, b, c, z, Hyp2f1Method::Euler, &ctrl()).unwrap();
            assert_relative_eq!(d.value(), e.value(), max_relative = 1e-10);
            let auto = gauss_2f1(a, b, c, z, &ctrl()).unwrap();
            assert!(auto.terms <= d.terms);
        }
    }

    #[test]
    fn terminating_series() {
        // (1 - z)^2 = 2F1(-2, b; b; z)
        let v = gauss_2f1(-2.0, 1.5, 1.5, 0.3, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), 0.49, max_relative = 1e-14);
        assert!(v.terms <= 3);
    }

    #[test]
    fn alternating_euler_polynomial_is_avoided() {
        // c - b = -18: the Euler form terminates but alternates; mpmath value
        let v = gauss_2f1(1.0, 23.0, 5.0, 0.9, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), 2_083_606_155_514_329.3, max_relative = 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(gauss_2f1(1.0, 1.0, 2.0, 1.0, &ctrl()).is_err());
        assert!(gauss_2f1(1.0, 1.0, -2.0, 0.5, &ctrl()).is_err());
        assert!(confluent_1f1(1.0, 0.0, 0.5, &ctrl()).is_err());
        assert!(lerch_phi(1.0, 1.0, &ctrl()).is_err());
        assert!(lerch_phi(0.5, 0.0, &ctrl()).is_err());
    }

    #[test]
    fn confluent_values() {
        let e = confluent_1f1(2.0, 2.0, 1.0, &ctrl()).unwrap();
        assert_relative_eq!(e.value(), std::f64::consts::E, max_relative = 1e-14);
        let v = confluent_1f1(1.0, 2.0, 1.0, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), std::f64::consts::E - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn lerch_values() {
        assert_relative_eq!(lerch_phi(0.0, 4.0, &ctrl()).unwrap().value(), 0.25);
        let v = lerch_phi(0.5, 1.0, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), 2.0 * 2f64.ln(), max_relative = 1e-14);
        // Alternating argument: Φ(-0.5, 1, 1) = ln(1.5) / 0.5
        let v = lerch_phi(-0.5, 1.0, &ctrl()).unwrap();
        assert_relative_eq!(v.value(), 1.5f64.ln() / 0.5, max_relative = 1e-13);
    }

    #[test]
    fn large_parameters_do_not_overflow() {
        let v = gauss_2f1(1.0, 900.0, 2.0, 0.6, &ctrl()).unwrap();
        assert!(v.ln_abs.is_finite());
        assert!(v.ln_abs > 700.0);
    }
}
