use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{context}: series did not converge within {terms} terms")]
    NonConvergence { context: &'static str, terms: usize },

    #[error("data set is empty")]
    EmptyData,

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("method of moments has no admissible solution (3(m2 - m1) - 4 m1^2 = {denominator:.6} <= 0)")]
    UnderDispersion { denominator: f64 },

    #[error("design matrix is rank deficient (rank {rank} < {columns} columns)")]
    RankDeficient { rank: usize, columns: usize },

    #[error("Vuong statistic undefined: log-ratio spread omega = {omega:.3e} is below 1e-12, the models are observationally identical")]
    DegenerateVuong { omega: f64 },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("row {row} (line {line}): {message}")]
    InvalidRow {
        row: usize,
        line: u64,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
