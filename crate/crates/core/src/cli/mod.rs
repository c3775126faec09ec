//! The `discomplex` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, config or
//! feature specs), 2 for data errors (unreadable or invalid inputs).

mod commands;
mod config;
mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    cmd_evaluate, cmd_extract, cmd_fit_stats, cmd_pair, cmd_rank, model_file_name, ReportRow,
    FEATURES_FILE, FOREST_FILE, PAIRS_FILE, RANKING_FILE, REPORT_FILE,
};
pub use config::Config;
pub use spec::FeatureSpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "discomplex",
    version,
    about = "Pairwise text-complexity experiments"
)]
pub struct Cli {
    /// Flat `key = value` settings file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the three discourse event models on a training manifest.
    FitStats(FitStatsArgs),
    /// Compute the 16 features for every article of a manifest.
    Extract(ExtractArgs),
    /// Build a labelled pairwise dataset.
    Pair(PairArgs),
    /// Cross-validate forests on feature subsets and test against `all`.
    Evaluate(EvaluateArgs),
    /// Rank features by information gain.
    Rank(RankArgs),
}

#[derive(Debug, Args)]
pub struct FitStatsArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Add-alpha smoothing constant (default 1).
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory holding the fitted models (default: the output directory).
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
    #[arg(long)]
    pub frequencies: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Feature CSV from `extract` (default `<out>/features.csv`).
    #[arg(long)]
    pub feature_table: Option<PathBuf>,
    /// `threshold` (rated articles) or `aligned` (complex/simple versions).
    #[arg(long)]
    pub mode: Option<String>,
    /// Score-difference threshold, or `auto` to balance the classes.
    #[arg(long)]
    pub threshold: Option<String>,
    /// TSV of `complex_id<TAB>simple_id` rows for aligned mode.
    #[arg(long)]
    pub alignment: Option<PathBuf>,
    #[arg(long)]
    pub pairs_per_class: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct ForestArgs {
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    #[arg(long)]
    pub features_per_split: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Pair dataset CSV (default `<out>/pairs.csv`).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Feature spec; repeatable. `grid` expands to the 12-row ablation grid,
    /// which is also the default.
    #[arg(long = "features")]
    pub features: Vec<String>,
    #[arg(long)]
    pub k_folds: Option<usize>,
    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Pair dataset CSV (default `<out>/pairs.csv`).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

/// Parse arguments, run one command and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let ctx = commands::Context {
        out: config.resolve_or("out", cli.out, PathBuf::from("out"))?,
        seed: config.resolve("seed", cli.seed)?,
        config,
    };
    match cli.command {
        Command::FitStats(a) => cmd_fit_stats(&ctx, a, stdout),
        Command::Extract(a) => cmd_extract(&ctx, a, stdout),
        Command::Pair(a) => cmd_pair(&ctx, a, stdout),
        Command::Evaluate(a) => cmd_evaluate(&ctx, a, stdout).map(|_| ()),
        Command::Rank(a) => cmd_rank(&ctx, a, stdout),
    }
}
