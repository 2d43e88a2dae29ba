//! `pdtemplates` command-line front end.
//!
//! Exit codes: 0 on success, 1 when the input or parameters are invalid,
//! 2 when a computation fails at runtime.

mod commands;
mod dataset;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "pdtemplates", version, about = "Template-function features for persistence diagrams")]
pub struct Cli {
    /// Base seed; item and run seeds are derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory, file or prefix, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagrams of Gaussian points restricted to the wedge.
    GenNormal(GenNormal),
    /// Point clouds sampled from the six manifold classes.
    GenManifold(GenManifold),
    /// Rossler x-series labelled by the zero-one test.
    GenRossler(GenRossler),
    /// Rips persistence diagrams of a point cloud or a whole dataset.
    ComputePd(ComputePd),
    /// Feature matrix of a dataset's diagrams.
    Featurize(Featurize),
    /// Ridge model fitted with cross-validated penalty.
    Train(Train),
    /// Scores a trained model on a feature matrix.
    Evaluate(Evaluate),
    /// Runs a complete experiment protocol.
    Experiment(Experiment),
}

#[derive(Debug, Args)]
pub struct GenNormal {
    /// Mean `birth,death` of the generating Gaussian.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0])]
    pub mu: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Points drawn per diagram.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Number of diagrams.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Class label recorded for every item.
    #[arg(long, default_value_t = 0)]
    pub label: usize,
}

#[derive(Debug, Args)]
pub struct GenManifold {
    /// Manifold class, or `all` for every class.
    #[arg(long, default_value = "all")]
    pub kind: String,
    /// Points per cloud.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Clouds per class.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct GenRossler {
    /// Explicit parameter values; overrides the grid.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 121)]
    pub alpha_steps: usize,
    #[arg(long, default_value_t = 0.37)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 0.43)]
    pub alpha_max: f64,
}

#[derive(Debug, Args)]
pub struct ComputePd {
    /// Point-cloud CSV, or a dataset directory produced by a `gen-*` command.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
    pub dims: Vec<usize>,
    /// Rips filtration cutoff (default: enclosing radius).
    #[arg(long)]
    pub max_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Featurize {
    /// Dataset directory whose items hold `diagram_h{dim}.csv` files.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
    pub dims: Vec<usize>,
    /// `tents` or `polynomials`.
    #[arg(long, default_value = "tents")]
    pub featurizer: String,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long, default_value_t = 0.05)]
    pub pad: f64,
    /// Fixed tent width; omitted means fitted from the data.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Featurizer sidecar JSON to reuse instead of fitting new parameters.
    #[arg(long)]
    pub reuse: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Train {
    #[arg(long)]
    pub features: PathBuf,
    /// CSV with a `label` (classes) or `target` (regression) column.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct Evaluate {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
}

#[derive(Debug, Args)]
pub struct Experiment {
    /// normal-classify, normal-regress-line, normal-regress-ball, manifold or rossler.
    pub name: String,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// `tents` or `polynomials` with the protocol's default parameters.
    #[arg(long)]
    pub featurizer: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long)]
    pub diagrams: Option<usize>,
    #[arg(long)]
    pub diagrams_per_class: Option<usize>,
}

/// Bad arguments detected by the command line layer itself.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<pdtemplates::Error>() {
        Some(e) if e.is_validation() => 1,
        _ => 2,
    }
}

/// The error chain on one line. Library errors already include their
/// source in the message, so causes that are already shown are skipped.
fn describe(err: &anyhow::Error) -> String {
    let mut text = err.to_string();
    for cause in err.chain().skip(1) {
        let cause = cause.to_string();
        if !text.contains(&cause) {
            text = format!("{text}: {cause}");
        }
    }
    text
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
