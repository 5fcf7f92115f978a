use crate::config::{parse_param, parse_suite_list, parse_tol};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kahler_core::suites::SuiteId;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum ListFormat {
    #[default]
    Text,
    Json,
}

/// Residual verification of Kähler, Killing-tensor and Hamiltonian-form
/// identities on sampled model charts.
#[derive(Debug, Parser)]
#[command(name = "verify", version, args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List model families and default instances.
    ListModels {
        #[arg(long, value_enum, default_value_t)]
        format: ListFormat,
    },
    /// List suites with the identities they check.
    ListSuites {
        #[arg(long, value_enum, default_value_t)]
        format: ListFormat,
    },
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Model id or family (see list-models).
    #[arg(long)]
    pub model: Option<String>,
    /// Model parameter override, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, String)>,
    /// Constant eigenvalue of a product model.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Suite id or `all`, repeatable or comma-separated.
    #[arg(long = "suite", value_name = "ID", value_delimiter = ',', value_parser = parse_suite_list)]
    pub suites: Vec<Vec<SuiteId>>,
    /// Sample points per suite.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override: VALUE for all suites or SUITE=VALUE.
    #[arg(long = "tol", value_name = "[SUITE=]VALUE", value_parser = parse_tol)]
    pub tol: Vec<(Option<SuiteId>, f64)>,
    /// Finite-difference step for the oracle checks.
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}
