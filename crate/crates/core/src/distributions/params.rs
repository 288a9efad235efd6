use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Parameters of the uniform-negative-binomial law: `X | N ~ U{0..N}`,
/// `N ~ NB(r, p)`. `q = 1 - p` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnbParams {
    r: f64,
    p: f64,
}

impl UnbParams {
    pub fn new(r: f64, p: f64) -> Result<Self> {
        check_positive("r", r)?;
        check_probability(p)?;
        Ok(Self { r, p })
    }

    /// Mean parameterization used by the regression model: `p = r / (2 mu + r)`.
    pub fn from_mean(mean: f64, r: f64) -> Result<Self> {
        check_positive("mean", mean)?;
        Self::new(r, r / (2.0 * mean + r))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn mixing(&self) -> NbParams {
        NbParams {
            r: self.r,
            p: self.p,
        }
    }
}

/// Negative binomial with PMF `C(r+n-1, n) p^r q^n` and mean `r q / p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    r: f64,
    p: f64,
}

impl NbParams {
    pub fn new(r: f64, p: f64) -> Result<Self> {
        check_positive("r", r)?;
        check_probability(p)?;
        Ok(Self { r, p })
    }

    /// `p = r / (mu + r)`.
    pub fn from_mean(mean: f64, r: f64) -> Result<Self> {
        check_positive("mean", mean)?;
        Self::new(r, r / (mean + r))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn mean(&self) -> f64 {
        self.r * self.q() / self.p
    }
}

/// Uniform-Poisson: `X | N ~ U{0..N}`, `N ~ Poisson(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpParams {
    lambda: f64,
}

impl UpParams {
    pub fn new(lambda: f64) -> Result<Self> {
        check_positive("lambda", lambda)?;
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.lambda / 2.0
    }
}

/// Geometric on `{0, 1, ...}` with PMF `p (1-p)^x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomParams {
    p: f64,
}

impl GeomParams {
    pub fn new(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}
