//! `specmode` command-line front end.
//!
//! Three command families: `phard` computes hardness probabilities and
//! bounds, `figure` sweeps the analytic bounds into plot-ready CSV grids,
//! `simulate` runs the exact small-scale linear-optics simulator. Commands
//! read an optional JSON config file; command-line flags override config
//! values. Outputs are CSV or JSON with floats at 17 significant digits,
//! written atomically when a path is given.

pub mod commands;
pub mod config;
pub mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use thiserror::Error;

/// Fixed caveat attached to every hardness report: a high hardness
/// probability is a necessary condition, never a proof. Deliberately
/// comma-free so it needs no quoting in CSV output.
pub const HARDNESS_DISCLAIMER: &str = "p_hard > epsilon is a necessary condition for \
     computational hardness but not a sufficient one: interference between instance terms \
     or special network structure (e.g. permutation matrices) can still admit efficient \
     classical simulation";

/// Thread-count cap honored before any parallel work starts.
pub const THREADS_ENV_VAR: &str = "SPECMODE_THREADS";

pub const EXIT_CONFIG_ERROR: i32 = 2;
pub const EXIT_BUDGET_ERROR: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Budget(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG_ERROR,
            CliError::Budget(_) => EXIT_BUDGET_ERROR,
            CliError::Other(_) => 1,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }
}

pub fn map_hardness_error(e: specmode::HardnessError) -> CliError {
    use specmode::HardnessError::*;
    match e {
        EnumerationBudget { .. } | PhotonCountTooLarge { .. } => CliError::Budget(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

pub fn map_sim_error(e: specmode::SimError) -> CliError {
    use specmode::SimError::*;
    match e {
        ConfigurationBudget { .. }
        | PhotonBudget { .. }
        | BasisBudget { .. }
        | PermanentTooLarge { .. } => CliError::Budget(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "specmode",
    about = "Boson-sampling hardness probabilities for imperfect photons",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hardness probabilities: exact, closed-form, Monte-Carlo, and bounds.
    Phard {
        #[command(subcommand)]
        verb: PhardVerb,
    },
    /// Plot-ready CSV grids of the analytic bounds.
    Figure {
        #[command(subcommand)]
        verb: FigureVerb,
    },
    /// Exact small-scale linear-optics simulation.
    Simulate {
        #[command(subcommand)]
        verb: SimulateVerb,
    },
}

#[derive(Debug, Subcommand)]
pub enum PhardVerb {
    /// Enumerate all instance vectors.
    Exact(CommonOpts),
    /// Closed form for identical mixed photons.
    Iid(CommonOpts),
    /// Seeded Monte-Carlo estimate.
    Mc(CommonOpts),
    /// Binomial-tail lower bound from the single-photon purity.
    BoundPurity(CommonOpts),
    /// Binomial-tail lower bound from the worst-case pairwise fidelity.
    BoundFidelity(CommonOpts),
}

#[derive(Debug, Subcommand)]
pub enum FigureVerb {
    /// Lower bound against purity and photon number.
    Purity(CommonOpts),
    /// Lower bound against worst-case fidelity and photon number.
    Fidelity(CommonOpts),
    /// Regions where the combined bound exceeds epsilon.
    Region(CommonOpts),
}

#[derive(Debug, Subcommand)]
pub enum SimulateVerb {
    /// Fock input, spectrally ideal photons.
    Ideal(CommonOpts),
    /// Pure photons with arbitrary spectral amplitudes.
    Pure(CommonOpts),
    /// Mixed photons via the instance-vector mixture.
    Mixed(CommonOpts),
    /// Two-photon coincidence at a 50:50 beamsplitter.
    Hom(CommonOpts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Flags shared by every command; flags override config-file values.
#[derive(Debug, Args, Default, Clone)]
pub struct CommonOpts {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path (stdout when absent); written via temp file + rename.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// RNG seed (Monte-Carlo, Haar unitaries).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Photon count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Hardness threshold n_hard.
    #[arg(long = "n-hard")]
    pub n_hard: Option<usize>,
    /// Threshold for the p_hard > epsilon predicate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Single-photon purity for bound-purity.
    #[arg(long)]
    pub purity: Option<f64>,
    /// Worst-case pairwise fidelity.
    #[arg(long)]
    pub fmin: Option<f64>,
    /// Number of spatial modes.
    #[arg(long)]
    pub m: Option<usize>,
    /// Enumeration budget override.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Cross-check simulate mixed against the enlarged-space route.
    #[arg(long)]
    pub oracle: bool,
}

/// Applies SPECMODE_THREADS, then dispatches.
pub fn run(cli: Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    match cli.command {
        Command::Phard { verb } => commands::phard::run(verb),
        Command::Figure { verb } => commands::figure::run(verb),
        Command::Simulate { verb } => commands::simulate::run(verb),
    }
}

fn init_thread_pool() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var(THREADS_ENV_VAR) {
        let threads: usize = raw.parse().map_err(|_| {
            CliError::config(format!("{THREADS_ENV_VAR}={raw} is not a thread count"))
        })?;
        if threads == 0 {
            return Err(CliError::config(format!(
                "{THREADS_ENV_VAR} must be at least 1"
            )));
        }
        // A second build_global in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}
