use std::io::{Read, Write};
use std::path::Path;

use super::mapping::{ColumnMapping, ColumnRule};
use super::{as_count, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Field separator; comma when `None`.
    pub delimiter: Option<u8>,
    pub mapping: Option<ColumnMapping>,
}

/// Loads `response` and `covariates` from a comma-separated file with a
/// header row.
pub fn load_csv(path: &Path, response: &str, covariates: &[&str]) -> Result<Dataset> {
    load_csv_with(path, response, covariates, &CsvOptions::default())
}

pub fn load_csv_with(
    path: &Path,
    response: &str,
    covariates: &[&str],
    options: &CsvOptions,
) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    read_csv(file, response, covariates, options)
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field.eq_ignore_ascii_case("na") || field.eq_ignore_ascii_case("nan")
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Utf8 { err, .. } => Error::Parse {
            line,
            message: format!("invalid UTF-8: {err}"),
        },
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

pub(crate) fn read_csv<R: Read>(
    reader: R,
    response: &str,
    covariates: &[&str],
    options: &CsvOptions,
) -> Result<Dataset> {
    let mut names = vec![response];
    for &c in covariates {
        if names.contains(&c) {
            return Err(Error::Config(format!("column `{c}` requested twice")));
        }
        names.push(c);
    }

    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter.unwrap_or(b','))
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Parse {
            line: 1,
            message: "missing header row".into(),
        });
    }

    let mapping = options.mapping.clone().unwrap_or_default();
    let rules: Vec<(ColumnRule, usize)> = names
        .iter()
        .map(|&name| {
            let rule = mapping.rule(name);
            let idx = header
                .iter()
                .position(|h| h == rule.source)
                .ok_or_else(|| Error::UnknownColumn(rule.source.clone()))?;
            Ok((rule, idx))
        })
        .collect::<Result<_>>()?;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    while rdr.read_record(&mut record).map_err(csv_error)? {
        row += 1;
        let line = record.position().map(|p| p.line()).unwrap_or(row as u64 + 1);
        for (k, (rule, idx)) in rules.iter().enumerate() {
            let field = record.get(*idx).unwrap_or("");
            let invalid = |message: String| Error::InvalidRow { row, line, message };
            if is_missing(field) {
                return Err(invalid(format!("missing value in `{}`", names[k])));
            }
            let value = match &rule.equals {
                Some(level) => f64::from(u8::from(field == level)),
                None => field.parse::<f64>().map_err(|_| {
                    invalid(format!("`{}` is not numeric: {field:?}", names[k]))
                })?,
            };
            if !value.is_finite() {
                return Err(invalid(format!("`{}` is not finite: {field:?}", names[k])));
            }
            if k == 0 && as_count(value).is_none() {
                return Err(invalid(format!(
                    "response `{response}` must be a non-negative integer, found {field:?}"
                )));
            }
            columns[k].push(value);
        }
    }
    if row == 0 {
        return Err(Error::EmptyData);
    }
    Dataset::new(names.iter().map(|s| s.to_string()).zip(columns).collect())
}

/// Writes every column with a header row. Values use the shortest decimal
/// form that reads back to the same double.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let names: Vec<&str> = dataset.column_names().collect();
    w.write_record(&names).map_err(csv_error)?;
    let cols: Vec<&[f64]> = names
        .iter()
        .map(|n| dataset.column(n))
        .collect::<Result<_>>()?;
    for i in 0..dataset.n() {
        w.write_record(cols.iter().map(|c| c[i].to_string()))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, response: &str, covs: &[&str]) -> Result<Dataset> {
        read_csv(text.as_bytes(), response, covs, &CsvOptions::default())
    }

    #[test]
    fn well_formed_file() {
        let d = load("y,a,b\n0,1.5,x\n2,2.5,y\n1,3,z\n", "y", &["a"]).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.column("y").unwrap(), &[0.0, 2.0, 1.0]);
        assert_eq!(d.column("a").unwrap(), &[1.5, 2.5, 3.0]);
    }

    #[test]
    fn negative_response_names_row() {
        let err = load("y,a\n1,0\n-1,0\n", "y", &["a"]).unwrap_err();
        assert!(matches!(err, Error::InvalidRow { row: 2, line: 3, .. }), "{err}");
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(load("y\n1.5\n", "y", &[]), Err(Error::InvalidRow { row: 1, .. })));
        assert!(matches!(load("y,a\n1,\n", "y", &["a"]), Err(Error::InvalidRow { .. })));
        assert!(matches!(load("y,a\n1,NA\n", "y", &["a"]), Err(Error::InvalidRow { .. })));
        assert!(matches!(load("y,a\n1,abc\n", "y", &["a"]), Err(Error::InvalidRow { .. })));
        assert!(matches!(load("y,a\n1,2\n3\n", "y", &["a"]), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load("y,a\n", "y", &["a"]), Err(Error::EmptyData)));
        assert!(matches!(load("", "y", &[]), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("y\n1\n", "z", &[]), Err(Error::UnknownColumn(_))));
        assert!(load("y,a\n1,2\n", "y", &["a", "a"]).is_err());
    }

    #[test]
    fn unselected_columns_may_be_anything() {
        let d = load("y,junk\n1,\n2,NA\n", "y", &[]).unwrap();
        assert_eq!(d.n(), 2);
    }

    #[test]
    fn semicolon_and_mapping() {
        let mapping = ColumnMapping::from_toml_str(
            "[columns.HOSP]\nsource = \"hospital\"\n[columns.MALE]\nsource = \"gender\"\nequals = \"male\"\n",
        )
        .unwrap();
        let opts = CsvOptions {
            delimiter: Some(b';'),
            mapping: Some(mapping),
        };
        let d = read_csv("hospital;gender\n0;male\n3;female\n".as_bytes(), "HOSP", &["MALE"], &opts)
            .unwrap();
        assert_eq!(d.column("MALE").unwrap(), &[1.0, 0.0]);
        assert_eq!(d.counts("HOSP").unwrap(), vec![0, 3]);
    }

    #[test]
    fn round_trip() {
        let d = Dataset::new(vec![
            ("y".into(), vec![0.0, 7.0, 2.0]),
            ("x".into(), vec![0.1, -2.5e-7, 1.0 / 3.0]),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "y", &["x"], &CsvOptions::default()).unwrap();
        assert_eq!(back, d);
    }
}
