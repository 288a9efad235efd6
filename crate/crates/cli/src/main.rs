mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use commands::{CliError, CliResult, Report};

fn emit(report: &Report, format: Format, output: Option<&std::path::Path>) -> CliResult<()> {
    let body = match format {
        Format::Text => report.text.clone(),
        Format::Json => serde_json::to_string_pretty(&report.json).expect("serializable report") + "\n",
    };
    let write = |mut w: Box<dyn Write>| w.write_all(body.as_bytes()).and_then(|_| w.flush());
    let result = match output {
        Some(path) => std::fs::File::create(path)
            .and_then(|f| write(Box::new(f)))
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))),
        None => write(Box::new(std::io::stdout().lock())),
    };
    result.map_err(|e| CliError::Core(unb_core::Error::Io(e)))
}

fn run(cli: Cli) -> CliResult<bool> {
    let (report, format, output) = match &cli.command {
        Command::Fit(a) => (commands::cmd_fit(a)?, a.output.format, a.output.output.as_deref()),
        Command::Regress(a) => (commands::cmd_regress(a)?, a.output.format, a.output.output.as_deref()),
        Command::Compare(a) => (commands::cmd_compare(a)?, a.output.format, a.output.output.as_deref()),
        Command::Summarize(a) => (commands::cmd_summarize(a)?, a.output.format, a.output.output.as_deref()),
        // The count file is the simulation's output; the report goes to stdout.
        Command::Simulate(a) => (commands::cmd_simulate(a)?, a.format, None),
    };
    emit(&report, format, output)?;
    for note in &report.notes {
        eprintln!("warning: {note}");
    }
    Ok(report.converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: at least one fit did not converge");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
