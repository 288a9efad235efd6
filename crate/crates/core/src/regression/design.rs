use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::error::{Error, Result};

pub const INTERCEPT_NAME: &str = "(Intercept)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub response: String,
    pub covariates: Vec<String>,
    pub intercept: bool,
}

impl RegressionSpec {
    pub fn new(response: impl Into<String>, covariates: &[&str]) -> Self {
        Self {
            response: response.into(),
            covariates: covariates.iter().map(|s| s.to_string()).collect(),
            intercept: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.covariates.iter().enumerate() {
            if *c == self.response {
                return Err(Error::Config(format!("covariate `{c}` is the response")));
            }
            if self.covariates[..i].contains(c) {
                return Err(Error::Config(format!("covariate `{c}` listed twice")));
            }
        }
        if !self.intercept && self.covariates.is_empty() {
            return Err(Error::Config("the model has no regressors".into()));
        }
        Ok(())
    }
}

/// Response counts and the `n × k` design, one named column per coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub y: Vec<u64>,
}

impl Design {
    pub fn new(names: Vec<String>, matrix: DMatrix<f64>, y: Vec<u64>) -> Result<Self> {
        if matrix.nrows() != y.len() || matrix.ncols() != names.len() {
            return Err(Error::InvalidParameter(format!(
                "design is {}×{} for {} responses and {} names",
                matrix.nrows(),
                matrix.ncols(),
                y.len(),
                names.len()
            )));
        }
        Ok(Self { names, matrix, y })
    }

    pub fn from_dataset(dataset: &Dataset, spec: &RegressionSpec) -> Result<Self> {
        spec.validate()?;
        let y = dataset.counts(&spec.response)?;
        let n = y.len();
        let mut names = Vec::new();
        let mut cols: Vec<&[f64]> = Vec::new();
        let ones = vec![1.0; n];
        if spec.intercept {
            names.push(INTERCEPT_NAME.to_string());
            cols.push(&ones);
        }
        for c in &spec.covariates {
            names.push(c.clone());
            cols.push(dataset.column(c)?);
        }
        let matrix = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
        Self::new(names, matrix, y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k(&self) -> usize {
        self.matrix.ncols()
    }

    /// Numerical rank from the singular values.
    pub fn rank(&self) -> usize {
        let sv = self.matrix.clone().svd(false, false).singular_values;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let tol = max * self.n().max(self.k()) as f64 * f64::EPSILON;
        sv.iter().filter(|&&s| s > tol).count()
    }

    pub fn check_full_rank(&self) -> Result<()> {
        let rank = self.rank();
        if rank < self.k() {
            return Err(Error::RankDeficient {
                rank,
                columns: self.k(),
            });
        }
        Ok(())
    }
}
