//! The Kampé de Fériet-like double series Θ₁⁽¹⁾ that gives the derivative of
//! ₂F₁ with respect to its second numerator parameter:
//!
//! ```text
//! d/db 2F1(a, b; c; z) = (z a / c) Θ(1, 1 | b, b+1, a+1 ; b+1 | 2, c+1 ; z, z)
//! ```

use super::series::{is_non_positive_integer, LogAccumulator, SeriesControl, SeriesSum};
use crate::error::{Error, Result};

/// Grid cap on the anti-diagonal index `m1 + m2`.
pub const THETA_MAX_DIAGONAL: usize = 4096;

/// Parameters of
/// `Σ (a1)_{m1} (a2)_{m2} (b1)_{m1} / (c1)_{m1} · (b2)_s (b3)_s / ((d1)_s (d2)_s) · x1^{m1}/m1! · x2^{m2}/m2!`
/// with `s = m1 + m2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c1: f64,
    pub d1: f64,
    pub d2: f64,
    pub x1: f64,
    pub x2: f64,
}

impl ThetaArgs {
    /// Arguments whose Θ₁⁽¹⁾ yields `d/db ₂F₁(a, b; c; z)` after multiplying by `z a / c`.
    pub fn b_derivative(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self {
            a1: 1.0,
            a2: 1.0,
            b1: b,
            b2: b + 1.0,
            b3: a + 1.0,
            c1: b + 1.0,
            d1: 2.0,
            d2: c + 1.0,
            x1: z,
            x2: z,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("d1", self.d1), ("d2", self.d2)] {
            if is_non_positive_integer(v) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "theta series requires {name} not a non-positive integer, got {v}"
                )));
            }
        }
        for (name, v) in [("x1", self.x1), ("x2", self.x2)] {
            if !(v.abs() < 1.0) {
                return Err(Error::Domain(format!(
                    "theta series requires |{name}| < 1, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Log-magnitude and sign of the running products of a one-index factor.
struct LogFactor {
    ln_abs: Vec<f64>,
    sign: Vec<f64>,
}

impl LogFactor {
    fn new() -> Self {
        Self {
            ln_abs: vec![0.0],
            sign: vec![1.0],
        }
    }

    fn extend(&mut self, ratio: f64) {
        let last = self.ln_abs.len() - 1;
        let s = self.sign[last];
        if ratio == 0.0 || s == 0.0 {
            self.ln_abs.push(f64::NEG_INFINITY);
            self.sign.push(0.0);
        } else {
            self.ln_abs.push(self.ln_abs[last] + ratio.abs().ln());
            self.sign.push(if ratio < 0.0 { -s } else { s });
        }
    }
}

/// Evaluates Θ₁⁽¹⁾ by anti-diagonals `s = m1 + m2`, checking at `s = 2^k`
/// whether the last anti-diagonal contributes less than `rel_tol` of the sum.
pub fn kampe_theta1(args: &ThetaArgs, ctrl: &SeriesControl) -> Result<SeriesSum> {
    args.validate()?;
    ctrl.validate()?;
    let ThetaArgs {
        a1,
        a2,
        b1,
        b2,
        b3,
        c1,
        d1,
        d2,
        x1,
        x2,
    } = *args;

    // first[m1] = (a1)_{m1} (b1)_{m1} / ((c1)_{m1} m1!) x1^{m1}
    let mut first = LogFactor::new();
    // second[m2] = (a2)_{m2} x2^{m2} / m2!
    let mut second = LogFactor::new();
    // joint[s] = (b2)_s (b3)_s / ((d1)_s (d2)_s)
    let mut joint = LogFactor::new();

    let mut total = LogAccumulator::new();
    let mut terms = 0usize;
    let mut checkpoint = 1usize;

    for s in 0..=THETA_MAX_DIAGONAL {
        if s > 0 {
            let k = (s - 1) as f64;
            first.extend((a1 + k) * (b1 + k) / ((c1 + k) * (k + 1.0)) * x1);
            second.extend((a2 + k) / (k + 1.0) * x2);
            joint.extend((b2 + k) * (b3 + k) / ((d1 + k) * (d2 + k)));
        }
        let mut diagonal = LogAccumulator::new();
        for m1 in 0..=s {
            let m2 = s - m1;
            let sign = first.sign[m1] * second.sign[m2] * joint.sign[s];
            if sign != 0.0 {
                diagonal.add(first.ln_abs[m1] + second.ln_abs[m2] + joint.ln_abs[s], sign);
            }
            terms += 1;
        }
        total.add_sum(&diagonal);

        if s == checkpoint {
            let negligible = diagonal.sign() == 0.0
                || diagonal.ln_abs() < ctrl.rel_tol.ln() + total.ln_abs()
                || diagonal.ln_abs() < ctrl.abs_tol.ln();
            if negligible && s >= 8 {
                return Ok(SeriesSum {
                    ln_abs: total.ln_abs(),
                    sign: total.sign(),
                    terms,
                });
            }
            checkpoint *= 2;
        }
    }
    Err(Error::NonConvergence {
        context: "kampe_theta1",
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_2f1;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_arguments_give_one() {
        let mut args = ThetaArgs::b_derivative(1.0, 2.3, 4.0, 0.0);
        args.x2 = 0.0;
        let v = kampe_theta1(&args, &SeriesControl::default()).unwrap();
        assert_eq!(v.value(), 1.0);
    }

    fn b_derivative_fd(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let ctrl = SeriesControl::default();
        let h = 1e-5;
        let up = gauss_2f1(a, b + h, c, z, &ctrl).unwrap().value();
        let down = gauss_2f1(a, b - h, c, z, &ctrl).unwrap().value();
        (up - down) / (2.0 * h)
    }

    #[test]
    fn matches_b_derivative_of_2f1() {
        for &(a, b, c, z) in &[(1.0, 2.3, 4.0, 0.3), (1.0, 0.884 + 2.0, 4.0, 0.5), (1.5, 0.7, 2.2, 0.4)] {
            let theta = kampe_theta1(&ThetaArgs::b_derivative(a, b, c, z), &SeriesControl::default())
                .unwrap()
                .value();
            assert_abs_diff_eq!(z * a / c * theta, b_derivative_fd(a, b, c, z), epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut args = ThetaArgs::b_derivative(1.0, 2.0, 3.0, 0.5);
        args.x1 = 1.0;
        assert!(kampe_theta1(&args, &SeriesControl::default()).is_err());
        let mut args = ThetaArgs::b_derivative(1.0, 2.0, 3.0, 0.5);
        args.d1 = -1.0;
        assert!(kampe_theta1(&args, &SeriesControl::default()).is_err());
    }
}
