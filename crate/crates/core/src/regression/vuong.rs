use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::normal_two_sided_p;

/// Non-nested comparison of two fitted models; positive `z` favours the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VuongResult {
    pub z: f64,
    pub omega: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Takes per-observation probabilities under each model.
pub fn vuong_test(pmf1: &[f64], pmf2: &[f64]) -> Result<VuongResult> {
    for (i, &p) in pmf1.iter().chain(pmf2).enumerate() {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "probability {i} is {p}; expected a value in (0, 1]"
            )));
        }
    }
    let ln1: Vec<f64> = pmf1.iter().map(|p| p.ln()).collect();
    let ln2: Vec<f64> = pmf2.iter().map(|p| p.ln()).collect();
    vuong_test_ln(&ln1, &ln2)
}

/// As [`vuong_test`], from log-probabilities.
pub fn vuong_test_ln(ln1: &[f64], ln2: &[f64]) -> Result<VuongResult> {
    if ln1.len() != ln2.len() {
        return Err(Error::InvalidParameter(format!(
            "per-observation vectors differ in length ({} vs {})",
            ln1.len(),
            ln2.len()
        )));
    }
    let n = ln1.len();
    if n < 2 {
        return Err(Error::InvalidParameter("the test needs at least two observations".into()));
    }
    let nf = n as f64;
    let m: Vec<f64> = ln1.iter().zip(ln2).map(|(a, b)| a - b).collect();
    let sum: f64 = m.iter().sum();
    let mean = sum / nf;
    let omega = (m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf).sqrt();
    if !(omega >= 1e-12) {
        return Err(Error::DegenerateVuong { omega });
    }
    let z = sum / (omega * nf.sqrt());
    Ok(VuongResult {
        z,
        omega,
        p_value: normal_two_sided_p(z),
        n,
    })
}
