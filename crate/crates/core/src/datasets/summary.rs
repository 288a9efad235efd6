use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::Result;

/// Descriptive statistics of a count column, overall or within one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group_label: String,
    pub n: usize,
    pub max: u64,
    pub min: u64,
    pub mean: f64,
    /// Unbiased (`n - 1`) sample variance.
    pub variance: f64,
    /// `variance / mean`; absent when either is zero.
    pub dispersion_index: Option<f64>,
    pub zero_proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub value: u64,
    pub count: usize,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateSummary {
    pub name: String,
    pub mean: f64,
    pub std_dev: f64,
}

fn group_summary(label: String, values: &[u64]) -> GroupSummary {
    let n = values.len();
    let nf = n as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / nf;
    let variance = if n > 1 {
        values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let zeros = values.iter().filter(|&&v| v == 0).count();
    GroupSummary {
        group_label: label,
        n,
        max: values.iter().copied().max().unwrap_or(0),
        min: values.iter().copied().min().unwrap_or(0),
        mean,
        variance,
        dispersion_index: (mean > 0.0 && variance > 0.0).then(|| variance / mean),
        zero_proportion: zeros as f64 / nf,
    }
}

fn format_level(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Summaries of `response`, one per distinct value of `group_by` in
/// ascending order, or a single `"all"` group.
pub fn summarize(dataset: &Dataset, response: &str, group_by: Option<&str>) -> Result<Vec<GroupSummary>> {
    let y = dataset.counts(response)?;
    let Some(group) = group_by else {
        return Ok(vec![group_summary("all".into(), &y)]);
    };
    let g = dataset.column(group)?;
    let mut groups: Vec<(f64, Vec<u64>)> = Vec::new();
    for (&level, &value) in g.iter().zip(&y) {
        match groups.iter_mut().find(|(l, _)| *l == level) {
            Some((_, values)) => values.push(value),
            None => groups.push((level, vec![value])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(groups
        .into_iter()
        .map(|(level, values)| group_summary(format!("{group}={}", format_level(level)), &values))
        .collect())
}

/// Relative frequency of each observed value of `response`.
pub fn relative_frequencies(dataset: &Dataset, response: &str) -> Result<Vec<FrequencyRow>> {
    let y = dataset.counts(response)?;
    let mut counts = BTreeMap::new();
    for v in &y {
        *counts.entry(*v).or_insert(0usize) += 1;
    }
    let n = y.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(value, count)| FrequencyRow {
            value,
            count,
            relative: count as f64 / n,
        })
        .collect())
}

/// Mean and unbiased standard deviation of each column.
pub fn covariate_summary(dataset: &Dataset, covariates: &[&str]) -> Result<Vec<CovariateSummary>> {
    covariates
        .iter()
        .map(|&name| {
            let x = dataset.column(name)?;
            let n = x.len() as f64;
            let mean = x.iter().sum::<f64>() / n;
            let var = if x.len() > 1 {
                x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            Ok(CovariateSummary {
                name: name.to_string(),
                mean,
                std_dev: var.sqrt(),
            })
        })
        .collect()
}
