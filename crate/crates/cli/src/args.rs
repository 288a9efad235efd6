use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "unb", version, about = "Fit, compare and simulate uniform-negative-binomial count models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit covariate-free count distributions to one column
    Fit(FitArgs),
    /// Fit log-link count regressions
    Regress(RegressArgs),
    /// Compare models by AIC and pairwise Vuong tests
    Compare(CompareArgs),
    /// Draw a seeded UNB sample and write it to a file
    Simulate(SimulateArgs),
    /// Descriptive summaries of a count column
    Summarize(SummarizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mle,
    Mm,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "count")]
    pub response: String,
    /// Field separator: a single character, or `comma`, `tab`, `semicolon`
    #[arg(long, default_value = "comma")]
    pub delimiter: String,
    /// TOML file mapping analysis column names onto raw file columns
    #[arg(long)]
    pub mapping: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "unb")]
    pub models: Vec<String>,
    /// Estimator for the UNB model; other models always use maximum likelihood
    #[arg(long, value_enum, default_value_t = Method::Mle)]
    pub method: Method,
    /// Also test the geometric special case of the UNB model
    #[arg(long)]
    pub lr_test: bool,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub covariates: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "unb")]
    pub models: Vec<String>,
    /// Drop the intercept column
    #[arg(long)]
    pub no_intercept: bool,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Regress on these columns; without them the models are covariate-free
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,
    /// Two or three models; the first is the reference
    #[arg(long, value_delimiter = ',', default_value = "unb,nb,up")]
    pub models: Vec<String>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Count file to write; a `.json` sidecar is written next to it
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Split the summary by the values of this column
    #[arg(long)]
    pub group_by: Option<String>,
    /// Also report mean and standard deviation of these columns
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_delimiter(spec: &str) -> Result<u8, String> {
    match spec {
        "comma" | "," => Ok(b','),
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        "semicolon" | ";" => Ok(b';'),
        s if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        s => Err(format!("unsupported delimiter `{s}`")),
    }
}
