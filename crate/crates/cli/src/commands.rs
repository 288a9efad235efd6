use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use unb_core::datasets::{
    covariate_summary, load_csv_with, relative_frequencies, summarize, ColumnMapping, CsvOptions,
    Dataset,
};
use unb_core::distributions::{unb_sample, UnbParams};
use unb_core::estimation::{
    fit_mm, fit_model, lr_test_geometric, CountModel, FitResult, FittedLaw, LrTestResult,
    ParameterEstimate,
};
use unb_core::regression::{fit_regression, vuong_test_ln, RegressionFit, RegressionSpec, VuongResult};

use crate::args::{
    parse_delimiter, CompareArgs, FitArgs, InputArgs, Method, RegressArgs, SimulateArgs,
    SummarizeArgs,
};
use crate::render::{num, opt, p_value, Table};

/// Version of the JSON documents described in docs/json-schema.md.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    Core(unb_core::Error),
    Usage(String),
}

impl From<unb_core::Error> for CliError {
    fn from(e: unb_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(unb_core::Error::NonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A rendered report. `converged = false` maps to exit status 3.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub converged: bool,
    pub notes: Vec<String>,
}

fn load(input: &InputArgs, columns: &[String]) -> CliResult<Dataset> {
    let delimiter = parse_delimiter(&input.delimiter).map_err(CliError::Usage)?;
    let mapping = input
        .mapping
        .as_deref()
        .map(ColumnMapping::from_file)
        .transpose()?;
    let options = CsvOptions {
        delimiter: Some(delimiter),
        mapping,
    };
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    Ok(load_csv_with(&input.input, &input.response, &cols, &options)?)
}

fn parse_models(names: &[String]) -> CliResult<Vec<CountModel>> {
    if names.is_empty() {
        return Err(CliError::Usage("no models given".into()));
    }
    names
        .iter()
        .map(|m| m.parse::<CountModel>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn check_level(level: f64) -> CliResult<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--level must lie in (0, 1), got {level}")))
    }
}

fn level_label(level: f64) -> String {
    format!("{}%", num(level * 100.0).trim_end_matches('0').trim_end_matches('.'))
}

#[derive(Serialize)]
struct ModelReport {
    model: CountModel,
    method: &'static str,
    parameters: Vec<ParameterEstimate>,
    log_likelihood: f64,
    aic: f64,
    converged: bool,
    iterations: usize,
}

fn moments_report(fit: &FitResult) -> ModelReport {
    ModelReport {
        model: CountModel::Unb,
        method: "moments",
        parameters: vec![
            ParameterEstimate {
                name: "r".into(),
                estimate: fit.params.r(),
                std_error: None,
                conf_interval: None,
            },
            ParameterEstimate {
                name: "p".into(),
                estimate: fit.params.p(),
                std_error: None,
                conf_interval: None,
            },
        ],
        log_likelihood: fit.log_likelihood,
        aic: fit.aic,
        converged: fit.converged,
        iterations: fit.iterations,
    }
}

fn render_model(out: &mut String, m: &ModelReport, n: usize, level: f64) {
    let method = if m.method == "moments" { "method of moments" } else { "maximum likelihood" };
    let _ = writeln!(out, "Model: {} ({method}), n = {n}", m.model);
    let lv = level_label(level);
    let lo = format!("{lv} CI low");
    let hi = format!("{lv} CI high");
    let mut t = Table::new(&["parameter", "estimate", "std.error", &lo, &hi]);
    for p in &m.parameters {
        t.row(vec![
            p.name.clone(),
            num(p.estimate),
            opt(p.std_error),
            opt(p.conf_interval.map(|c| c.0)),
            opt(p.conf_interval.map(|c| c.1)),
        ]);
    }
    out.push_str(&t.render());
    let _ = writeln!(out, "log-likelihood  {}", num(m.log_likelihood));
    let _ = writeln!(out, "AIC             {}", num(m.aic));
    let _ = writeln!(
        out,
        "converged       {} ({} iterations)\n",
        if m.converged { "yes" } else { "no" },
        m.iterations
    );
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<Report> {
    check_level(args.level)?;
    let models = parse_models(&args.models)?;
    let data = load(&args.input, &[])?;
    let y = data.counts(&args.input.response)?;

    let mut reports = Vec::new();
    for &model in &models {
        let report = if model == CountModel::Unb && args.method == Method::Mm {
            moments_report(&fit_mm(&y)?)
        } else {
            let fit = fit_model(model, &y, args.level)?;
            ModelReport {
                model,
                method: "mle",
                parameters: fit.parameters,
                log_likelihood: fit.log_likelihood,
                aic: fit.aic,
                converged: fit.converged,
                iterations: fit.iterations,
            }
        };
        reports.push(report);
    }
    let lr: Option<LrTestResult> = if args.lr_test { Some(lr_test_geometric(&y)?) } else { None };

    let mut text = String::new();
    for m in &reports {
        render_model(&mut text, m, y.len(), args.level);
    }
    if let Some(lr) = &lr {
        let _ = writeln!(text, "Likelihood-ratio test of r = 2 (geometric) against the UNB model");
        let _ = writeln!(text, "statistic       {}", num(lr.statistic));
        let _ = writeln!(text, "df              {}", lr.df);
        let _ = writeln!(text, "p-value         {}", p_value(lr.p_value));
    }

    let converged = reports.iter().all(|m| m.converged);
    let notes = reports
        .iter()
        .filter(|m| !m.converged)
        .map(|m| format!("{} fit did not reach the gradient tolerance", m.model))
        .collect();
    Ok(Report {
        json: json!({
            "schema_version": SCHEMA_VERSION,
            "command": "fit",
            "input": args.input.input,
            "response": args.input.response,
            "n": y.len(),
            "level": args.level,
            "seed": args.seed,
            "models": reports,
            "lr_test": lr,
        }),
        text,
        converged,
        notes,
    })
}

fn regression_spec(input: &InputArgs, covariates: &[String], intercept: bool) -> RegressionSpec {
    let covs: Vec<&str> = covariates.iter().map(String::as_str).collect();
    let mut spec = RegressionSpec::new(input.response.clone(), &covs);
    spec.intercept = intercept;
    spec
}

fn render_regression(out: &mut String, fit: &RegressionFit) {
    let _ = writeln!(out, "Model: {} regression, n = {}", fit.model, fit.n);
    let mut t = Table::new(&["coefficient", "estimate", "std.error", "wald t", "p-value"]);
    for (k, name) in fit.names.iter().enumerate() {
        t.row(vec![
            name.clone(),
            num(fit.beta[k]),
            num(fit.std_errors[k]),
            num(fit.wald_t[k]),
            if fit.p_values[k].is_nan() { "-".into() } else { p_value(fit.p_values[k]) },
        ]);
    }
    out.push_str(&t.render());
    if let Some(r) = fit.r {
        let se = fit.std_errors[fit.beta.len()];
        let _ = writeln!(out, "r               {} (std.error {})", num(r), num(se));
    }
    let _ = writeln!(out, "log-likelihood  {}", num(fit.log_likelihood));
    let _ = writeln!(out, "AIC             {}", num(fit.aic));
    let _ = writeln!(
        out,
        "converged       {} ({} iterations)",
        if fit.converged { "yes" } else { "no" },
        fit.iterations
    );
    for d in &fit.diagnostics {
        let _ = writeln!(out, "note: {d}");
    }
    out.push('\n');
}

pub fn cmd_regress(args: &RegressArgs) -> CliResult<Report> {
    check_level(args.level)?;
    let models = parse_models(&args.models)?;
    let data = load(&args.input, &args.covariates)?;
    let spec = regression_spec(&args.input, &args.covariates, !args.no_intercept);
    let fits = models
        .iter()
        .map(|&m| fit_regression(m, &data, &spec, args.level))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    for f in &fits {
        render_regression(&mut text, f);
    }
    let converged = fits.iter().all(|f| f.converged);
    let notes = fits
        .iter()
        .filter(|f| !f.converged)
        .flat_map(|f| f.diagnostics.iter().map(move |d| format!("{}: {d}", f.model)))
        .collect();
    Ok(Report {
        json: json!({
            "schema_version": SCHEMA_VERSION,
            "command": "regress",
            "input": args.input.input,
            "response": args.input.response,
            "covariates": args.covariates,
            "intercept": !args.no_intercept,
            "level": args.level,
            "seed": args.seed,
            "fits": fits,
        }),
        text,
        converged,
        notes,
    })
}

struct Compared {
    model: CountModel,
    log_likelihood: f64,
    aic: f64,
    parameters: usize,
    converged: bool,
    ln_pmf: Vec<f64>,
}

fn per_observation(law: &FittedLaw, y: &[u64]) -> CliResult<Vec<f64>> {
    let mut cache: HashMap<u64, f64> = HashMap::new();
    y.iter()
        .map(|&x| match cache.get(&x) {
            Some(v) => Ok(*v),
            None => {
                let v = law.ln_pmf(x)?;
                cache.insert(x, v);
                Ok(v)
            }
        })
        .collect()
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<Report> {
    check_level(args.level)?;
    let models = parse_models(&args.models)?;
    if !(2..=3).contains(&models.len()) {
        return Err(CliError::Usage(format!(
            "compare needs two or three models, got {}",
            models.len()
        )));
    }
    let data = load(&args.input, &args.covariates)?;
    let y = data.counts(&args.input.response)?;
    let with_covariates = !args.covariates.is_empty();

    let mut fitted = Vec::new();
    for &model in &models {
        if with_covariates {
            let spec = regression_spec(&args.input, &args.covariates, true);
            let fit = fit_regression(model, &data, &spec, args.level)?;
            fitted.push(Compared {
                model,
                log_likelihood: fit.log_likelihood,
                aic: fit.aic,
                parameters: fit.free_parameters(),
                converged: fit.converged,
                ln_pmf: fit.ln_pmf,
            });
        } else {
            let fit = fit_model(model, &y, args.level)?;
            fitted.push(Compared {
                model,
                log_likelihood: fit.log_likelihood,
                aic: fit.aic,
                parameters: fit.parameters.len(),
                converged: fit.converged,
                ln_pmf: per_observation(&fit.law, &y)?,
            });
        }
    }

    let reference = &fitted[0];
    let mut pairs = Vec::new();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "Model comparison, n = {}{}",
        y.len(),
        if with_covariates { " (regression)" } else { " (no covariates)" }
    );
    let mut t = Table::new(&["model", "parameters", "log-likelihood", "AIC", "converged"]);
    for f in &fitted {
        t.row(vec![
            f.model.to_string(),
            f.parameters.to_string(),
            num(f.log_likelihood),
            num(f.aic),
            if f.converged { "yes".into() } else { "no".into() },
        ]);
    }
    text.push_str(&t.render());
    let _ = writeln!(text, "\nVuong tests against {}", reference.model);
    let mut vt = Table::new(&["versus", "z", "omega", "p-value", "preferred"]);
    for other in &fitted[1..] {
        match vuong_test_ln(&reference.ln_pmf, &other.ln_pmf) {
            Ok(v) => {
                let preferred = preferred(&v, reference.model, other.model);
                vt.row(vec![
                    other.model.to_string(),
                    num(v.z),
                    num(v.omega),
                    p_value(v.p_value),
                    preferred.clone(),
                ]);
                pairs.push(json!({
                    "reference": reference.model,
                    "versus": other.model,
                    "z": v.z,
                    "omega": v.omega,
                    "p_value": v.p_value,
                    "n": v.n,
                    "preferred": preferred,
                }));
            }
            Err(e) => {
                vt.row(vec![other.model.to_string(), "-".into(), "-".into(), "-".into(), "degenerate".into()]);
                pairs.push(json!({
                    "reference": reference.model,
                    "versus": other.model,
                    "error": e.to_string(),
                }));
            }
        }
    }
    text.push_str(&vt.render());
    for p in &pairs {
        if let Some(e) = p.get("error").and_then(Value::as_str) {
            let name = |k: &str| p[k].as_str().unwrap_or_default().to_string();
            let _ = writeln!(text, "note: {} vs {}: {e}", name("reference"), name("versus"));
        }
    }

    let converged = fitted.iter().all(|f| f.converged);
    let notes = fitted
        .iter()
        .filter(|f| !f.converged)
        .map(|f| format!("{} fit did not reach the gradient tolerance", f.model))
        .collect();
    let model_json: Vec<Value> = fitted
        .iter()
        .map(|f| {
            json!({
                "model": f.model,
                "parameters": f.parameters,
                "log_likelihood": f.log_likelihood,
                "aic": f.aic,
                "converged": f.converged,
            })
        })
        .collect();
    Ok(Report {
        json: json!({
            "schema_version": SCHEMA_VERSION,
            "command": "compare",
            "input": args.input.input,
            "response": args.input.response,
            "covariates": args.covariates,
            "n": y.len(),
            "level": args.level,
            "seed": args.seed,
            "models": model_json,
            "vuong": pairs,
        }),
        text,
        converged,
        notes,
    })
}

fn preferred(v: &VuongResult, reference: CountModel, other: CountModel) -> String {
    if v.p_value >= 0.05 {
        "neither".into()
    } else if v.z > 0.0 {
        reference.to_string()
    } else {
        other.to_string()
    }
}

pub fn sidecar_path(output: &Path) -> std::path::PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".json");
    name.into()
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<Report> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let params = UnbParams::new(args.r, args.p)?;
    let xs = unb_sample(&params, args.n, args.seed);
    let mut body = String::with_capacity(args.n * 3 + 6);
    body.push_str("count\n");
    for x in &xs {
        let _ = writeln!(body, "{x}");
    }
    let io_err = |path: &Path, e: std::io::Error| {
        CliError::Core(unb_core::Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    };
    std::fs::write(&args.output, body).map_err(|e| io_err(&args.output, e))?;
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "model": "unb",
        "r": args.r,
        "p": args.p,
        "n": args.n,
        "seed": args.seed,
        "output": args.output,
    });
    let sidecar = sidecar_path(&args.output);
    let pretty = serde_json::to_string_pretty(&meta).expect("serializable metadata") + "\n";
    std::fs::write(&sidecar, pretty).map_err(|e| io_err(&sidecar, e))?;
    Ok(Report {
        text: format!(
            "wrote {} counts from UNB(r = {}, p = {}) with seed {} to {} (metadata in {})\n",
            args.n,
            num(args.r),
            num(args.p),
            args.seed,
            args.output.display(),
            sidecar.display()
        ),
        json: meta,
        converged: true,
        notes: Vec::new(),
    })
}

pub fn cmd_summarize(args: &SummarizeArgs) -> CliResult<Report> {
    let mut columns: Vec<String> = args.covariates.clone();
    if let Some(g) = &args.group_by {
        if !columns.contains(g) && *g != args.input.response {
            columns.push(g.clone());
        }
    }
    let data = load(&args.input, &columns)?;
    let response = &args.input.response;
    let overall = summarize(&data, response, None)?;
    let groups = match &args.group_by {
        Some(g) => summarize(&data, response, Some(g))?,
        None => Vec::new(),
    };
    let freqs = relative_frequencies(&data, response)?;
    let covs: Vec<&str> = args.covariates.iter().map(String::as_str).collect();
    let cov_summary = covariate_summary(&data, &covs)?;

    let mut text = String::new();
    let _ = writeln!(text, "Summary of {response}");
    let mut t = Table::new(&["group", "n", "min", "max", "mean", "variance", "ID", "zero share"]);
    for g in overall.iter().chain(&groups) {
        t.row(vec![
            g.group_label.clone(),
            g.n.to_string(),
            g.min.to_string(),
            g.max.to_string(),
            num(g.mean),
            num(g.variance),
            opt(g.dispersion_index),
            num(g.zero_proportion),
        ]);
    }
    text.push_str(&t.render());
    let _ = writeln!(text, "\nRelative frequencies of {response}");
    let mut f = Table::new(&["value", "count", "relative"]);
    for r in &freqs {
        f.row(vec![r.value.to_string(), r.count.to_string(), num(r.relative)]);
    }
    text.push_str(&f.render());
    if !cov_summary.is_empty() {
        text.push_str("\nCovariates\n");
        let mut c = Table::new(&["column", "mean", "std.dev"]);
        for s in &cov_summary {
            c.row(vec![s.name.clone(), num(s.mean), num(s.std_dev)]);
        }
        text.push_str(&c.render());
    }
    Ok(Report {
        json: json!({
            "schema_version": SCHEMA_VERSION,
            "command": "summarize",
            "input": args.input.input,
            "response": response,
            "group_by": args.group_by,
            "overall": overall[0],
            "groups": groups,
            "frequencies": freqs,
            "covariates": cov_summary,
        }),
        text,
        converged: true,
        notes: Vec::new(),
    })
}
