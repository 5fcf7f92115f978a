//! Command-line front end for the `kahler-core` residual suites.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;

use cli::{Cli, Command, Format, ListFormat};
use config::Settings;
use error::{CliError, EXIT_FAIL, EXIT_PASS};
use kahler_core::report::Report;
use kahler_core::suites;
use std::io::Write;
use std::time::Instant;

/// Builds the model and runs the selected suites.
pub fn execute(settings: &Settings) -> Result<Report, CliError> {
    let model = settings.suite.spec.build().map_err(|e| CliError::Construction(e.to_string()))?;
    Ok(suites::run(&settings.suite, &model))
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run_cli(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Some(Command::ListModels { format }) => {
            let s = match format {
                ListFormat::Text => output::list_models_text(),
                ListFormat::Json => output::list_models_json(),
            };
            emit(&s, None)?;
            Ok(EXIT_PASS)
        }
        Some(Command::ListSuites { format }) => {
            let s = match format {
                ListFormat::Text => output::list_suites_text(),
                ListFormat::Json => output::list_suites_json(),
            };
            emit(&s, None)?;
            Ok(EXIT_PASS)
        }
        None => {
            let settings = Settings::resolve(&cli.run)?;
            let start = Instant::now();
            let report = execute(&settings)?;
            let wall = start.elapsed();
            let s = match settings.format {
                Format::Text => output::text(&report, Some(wall)),
                Format::Json => output::json(&report),
                Format::Csv => output::csv(&report),
            };
            emit(&s, settings.out.as_deref())?;
            Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}
