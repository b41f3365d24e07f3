use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fmdt_core::{Hyperparameters, InferenceMode, TNorm};

mod commands;

/// Fuzzy multi-way decision trees over quantile-transformed attributes.
#[derive(Parser, Debug)]
#[command(name = "fmdt", version, about)]
struct Cli {
    /// Worker threads for data-parallel stages (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit quantile tables and dump the fuzzy partitions.
    Partition(PartitionArgs),
    /// Train a model and write it as JSON.
    Train(TrainArgs),
    /// Predict every row of a data file with a saved model.
    Predict(PredictArgs),
    /// Stratified k-fold cross-validation.
    Cv(CvArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// CSV data file.
    #[arg(long)]
    data: PathBuf,
    /// Schema file: one `name,kind[,values]` line per column.
    #[arg(long)]
    schema: PathBuf,
    /// The first CSV line is a header.
    #[arg(long)]
    header: bool,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Fuzzy sets per continuous attribute.
    #[arg(long, default_value_t = 5)]
    fuzzy_sets: usize,
    /// Number of quantiles for the transform.
    #[arg(long, default_value_t = 1000)]
    quantiles: usize,
    #[arg(long, default_value_t = 5)]
    max_depth: usize,
    /// Purity threshold, as a fraction.
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    gamma: f64,
    /// Minimum node cardinality to split, as a fraction of the rows.
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    phi: f64,
    /// Minimum child cardinality to recurse, as a fraction of the rows.
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, default_value = "product")]
    tnorm: TNorm,
    /// max-matching or weighted-vote.
    #[arg(long, default_value = "weighted-vote")]
    inference: InferenceMode,
    /// Accepted for compatibility; has no effect.
    #[arg(long)]
    max_bins: Option<usize>,
}

impl ModelArgs {
    fn hyperparameters(&self) -> Hyperparameters {
        Hyperparameters {
            fuzzy_sets: self.fuzzy_sets,
            quantiles: self.quantiles,
            max_depth: self.max_depth,
            gamma: self.gamma,
            phi: self.phi,
            lambda: self.lambda,
            tnorm: self.tnorm,
            inference: self.inference,
        }
    }
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 5)]
    fuzzy_sets: usize,
    #[arg(long, default_value_t = 1000)]
    quantiles: usize,
    /// Fuzzy-set CSV destination (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the quantile tables as JSON.
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Where to write the model JSON.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Schema file (default: the model's own schema, class column last).
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    header: bool,
    /// Overrides the model's inference mode.
    #[arg(long)]
    inference: Option<InferenceMode>,
    /// Predictions CSV destination (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Index of the positive class for binary rates.
    #[arg(long, default_value_t = 0)]
    positive: usize,
    /// Report JSON destination.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs, detected before any work is done.
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    let outcome = fmdt_core::parallel::with_workers(workers, || commands::run(cli.command))
        .unwrap_or_else(|e| Err(Failure::Runtime(e.into())));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(e)) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Output piped into a reader that exited early, e.g. `| head`.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|e| {
                matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
            })
    })
}
