//! `boson-reupload`: generate data, train, evaluate, and export decision grids.
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use boson_reupload::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "boson-reupload", version, about = "Two-mode photonic classifier with data re-uploading")]
#[command(after_help = "Settings are layered: built-in defaults, then --config, then flags.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate training and test sets labeled by a circle in the unit square.
    GenData(GenDataArgs),
    /// Train circuit parameters and write theta.json and history.csv.
    Train(TrainArgs),
    /// Print metrics JSON for a parameter file on the test set.
    Eval(EvalArgs),
    /// Write the decision surface on a regular grid as CSV.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for outputs and default data paths.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenDataArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    /// Training set seed; the test set uses seed + 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Circle center as `x1,x2`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    center: Option<Vec<f64>>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    train_out: Option<PathBuf>,
    #[arg(long)]
    test_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExactProbe {
    Analytic,
    Probed,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Training CSV.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Estimate probe probabilities from this many shots each.
    #[arg(long, conflicts_with = "probe")]
    shots: Option<u64>,
    /// How exact per-point polynomials are obtained.
    #[arg(long, value_enum)]
    probe: Option<ExactProbe>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Seeds shot sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Seeds the random initial parameters.
    #[arg(long)]
    init_seed: Option<u64>,
    /// Start from the parameters in this file instead of a random draw.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Refit the decision threshold on the training set after training.
    #[arg(long)]
    fit_threshold: bool,
    #[arg(long)]
    theta_out: Option<PathBuf>,
    #[arg(long)]
    history_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Parameter file written by `train`.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Test CSV.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Overrides the threshold stored with the parameters.
    #[arg(long)]
    threshold: Option<f64>,
    /// Also write a decision grid with this many points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    grid_out: Option<PathBuf>,
    /// Also write the metrics JSON to this file.
    #[arg(long)]
    metrics_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    theta: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Points per axis.
    #[arg(long, default_value_t = 150)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub const USAGE: u8 = 2;
    pub const DATA: u8 = 3;
    pub const NUMERIC: u8 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: Self::USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: Self::DATA, message: message.into() }
    }

    /// Classifies a library error, prefixing the message with `context`.
    pub fn from_lib(context: impl fmt::Display, err: Error) -> Self {
        let code = match err {
            Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::MalformedRow { .. }
            | Error::EmptyDataset
            | Error::DimensionMismatch { .. }
            | Error::NotNormalized { .. } => Self::DATA,
            Error::Numeric(_) | Error::ProbabilityOutOfRange { .. } | Error::NotUnitary { .. } => Self::NUMERIC,
            _ => Self::USAGE,
        };
        Self { code, message: format!("{context}: {err}") }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData(args) => commands::gen_data(args),
        Command::Train(args) => commands::train(args),
        Command::Eval(args) => commands::eval(args),
        Command::Grid(args) => commands::grid(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
