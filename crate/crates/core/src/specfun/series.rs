//! Truncation policy and log-space accumulation shared by every series in
//! this module.

use crate::error::{Error, Result};

/// Truncation policy for the infinite series evaluated in [`crate::specfun`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        let ctrl = Self {
            rel_tol,
            abs_tol,
            max_terms,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_terms == 0 {
            return Err(Error::InvalidParameter(format!(
                "series control requires rel_tol > 0, abs_tol > 0, max_terms >= 1 (got {:?})",
                self
            )));
        }
        Ok(())
    }
}

/// Result of a series evaluation, kept in log space.
///
/// `ln_abs` is `ln |S|`, `sign` is `+1`, `-1` or `0`, and `terms` is the
/// number of terms consumed before the stopping rule fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub ln_abs: f64,
    pub sign: f64,
    pub terms: usize,
}

impl SeriesSum {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// Multiplies the sum by `exp(ln_factor)`.
    pub(crate) fn scaled(mut self, ln_factor: f64) -> Self {
        self.ln_abs += ln_factor;
        self
    }
}

/// Running sum `exp(scale) * acc` that never overflows as long as individual
/// terms are representable in log space.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogAccumulator {
    scale: f64,
    acc: f64,
}

impl LogAccumulator {
    pub(crate) fn new() -> Self {
        Self {
            scale: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    pub(crate) fn add(&mut self, ln_abs: f64, sign: f64) {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            return;
        }
        if self.scale == f64::NEG_INFINITY {
            self.scale = ln_abs;
            self.acc = sign;
            return;
        }
        let shift = ln_abs - self.scale;
        if shift > 500.0 {
            self.acc = self.acc * (-shift).exp() + sign;
            self.scale = ln_abs;
        } else {
            self.acc += sign * shift.exp();
        }
        if self.acc.abs() > 1e250 || (self.acc != 0.0 && self.acc.abs() < 1e-250) {
            self.renormalize();
        }
    }

    pub(crate) fn add_sum(&mut self, other: &LogAccumulator) {
        self.add(other.ln_abs(), other.sign());
    }

    fn renormalize(&mut self) {
        let l = self.acc.abs().ln();
        self.scale += l;
        self.acc = self.acc.signum();
    }

    pub(crate) fn ln_abs(&self) -> f64 {
        if self.acc == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.scale + self.acc.abs().ln()
        }
    }

    pub(crate) fn sign(&self) -> f64 {
        if self.acc == 0.0 {
            0.0
        } else {
            self.acc.signum()
        }
    }
}

/// Sums `Σ t_n` given `ln |t_0|`, its sign, and the term ratio
/// `t_{n+1} / t_n` as a function of `n`.
///
/// Stops when `|t_n| < rel_tol |S_n|` for two consecutive terms while the
/// terms are shrinking, when `|t_n| < abs_tol`, or when the ratio is exactly
/// zero (terminating series).
pub(crate) fn sum_by_ratio(
    ctrl: &SeriesControl,
    context: &'static str,
    ln_first: f64,
    sign_first: f64,
    mut ratio: impl FnMut(usize) -> f64,
) -> Result<SeriesSum> {
    ctrl.validate()?;
    let ln_rel = ctrl.rel_tol.ln();
    let ln_abs_tol = ctrl.abs_tol.ln();

    let mut acc = LogAccumulator::new();
    let mut ln_term = ln_first;
    let mut sign = sign_first;
    let mut small_run = 0usize;

    for n in 0..ctrl.max_terms {
        acc.add(ln_term, sign);
        let terms = n + 1;

        let rho = ratio(n);
        if !rho.is_finite() {
            return Err(Error::Domain(format!(
                "{context}: non-finite term ratio at n = {n}"
            )));
        }
        if rho == 0.0 || sign == 0.0 {
            return Ok(finish(&acc, terms));
        }

        if ln_term < ln_abs_tol && rho.abs() < 1.0 {
            return Ok(finish(&acc, terms));
        }
        if n > 0 && ln_term < ln_rel + acc.ln_abs() && rho.abs() < 1.0 {
            small_run += 1;
            if small_run >= 2 {
                return Ok(finish(&acc, terms));
            }
        } else {
            small_run = 0;
        }

        ln_term += rho.abs().ln();
        if rho < 0.0 {
            sign = -sign;
        }
    }
    Err(Error::NonConvergence {
        context,
        terms: ctrl.max_terms,
    })
}

fn finish(acc: &LogAccumulator, terms: usize) -> SeriesSum {
    SeriesSum {
        ln_abs: acc.ln_abs(),
        sign: acc.sign(),
        terms,
    }
}

/// True when `x` is zero or a negative integer.
pub(crate) fn is_non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}
