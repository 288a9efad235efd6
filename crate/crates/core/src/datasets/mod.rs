//! Tabular count data: CSV ingestion, column mappings and descriptive
//! summaries.

mod io;
mod mapping;
mod summary;

use indexmap::IndexMap;

use crate::error::{Error, Result};

pub use io::{load_csv, load_csv_with, write_csv, CsvOptions};
pub use mapping::{ColumnMapping, ColumnRule};
pub use summary::{
    covariate_summary, relative_frequencies, summarize, CovariateSummary, FrequencyRow,
    GroupSummary,
};

/// Named numeric columns of a common length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: IndexMap<String, Vec<f64>>,
    n: usize,
}

impl Dataset {
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let n = columns.first().map(|c| c.1.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::EmptyData);
        }
        let mut map = IndexMap::with_capacity(columns.len());
        for (name, values) in columns {
            if values.len() != n {
                return Err(Error::DegenerateData(format!(
                    "column `{name}` has {} rows, expected {n}",
                    values.len()
                )));
            }
            if map.insert(name.clone(), values).is_some() {
                return Err(Error::Config(format!("duplicate column `{name}`")));
            }
        }
        Ok(Self { columns: map, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// The column as counts; every entry must be a non-negative integer.
    pub fn counts(&self, name: &str) -> Result<Vec<u64>> {
        self.column(name)?
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                as_count(v).ok_or_else(|| Error::InvalidRow {
                    row: i + 1,
                    line: i as u64 + 2,
                    message: format!("`{name}` must be a non-negative integer, found {v}"),
                })
            })
            .collect()
    }

    /// A copy restricted to the given columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Dataset> {
        let cols = names
            .iter()
            .map(|&n| Ok((n.to_string(), self.column(n)?.to_vec())))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(cols)
    }
}

pub(crate) fn as_count(v: f64) -> Option<u64> {
    (v >= 0.0 && v.fract() == 0.0 && v < 9.007_199_254_740_992e15).then_some(v as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        assert!(matches!(Dataset::new(vec![]), Err(Error::EmptyData)));
        assert!(Dataset::new(vec![("a".into(), vec![1.0]), ("b".into(), vec![1.0, 2.0])]).is_err());
        assert!(Dataset::new(vec![("a".into(), vec![1.0]), ("a".into(), vec![2.0])]).is_err());

        let d = Dataset::new(vec![("y".into(), vec![0.0, 3.0, 1.5])]).unwrap();
        assert_eq!(d.n(), 3);
        assert!(matches!(d.column("z"), Err(Error::UnknownColumn(_))));
        assert!(matches!(d.counts("y"), Err(Error::InvalidRow { row: 3, .. })));
    }
}
