//! `tirpmine` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tirpmine::abstraction::Method;
use tirpmine::detect::Representation;
use tirpmine::{MinSupport, RelationMode, SacMode};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, missing inputs or invalid parameter values.
    Usage(String),
    /// Malformed or inconsistent input data.
    Data(tirpmine::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Data(e) => e.fmt(f),
        }
    }
}

impl From<tirpmine::Error> for CliError {
    fn from(e: tirpmine::Error) -> Self {
        match e {
            tirpmine::Error::InvalidArgument(m) => CliError::Usage(m),
            e => CliError::Data(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tirpmine",
    version,
    about = "Mine time-interval related patterns from clinical time series"
)]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for mining and detection.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate raw measurements and write them as a canonical points file.
    Ingest(IngestArgs),
    /// Discretize and interpolate points into symbolic intervals.
    Abstract(AbstractArgs),
    /// Mine frequent TIRPs from an intervals file.
    Mine(MineArgs),
    /// List every instance of mined TIRPs in an intervals file.
    Detect(DetectArgs),
    /// Export an entity × TIRP feature matrix.
    Features(FeaturesArgs),
    /// Assign entities to mining and cross-validation folds.
    Folds(FoldsArgs),
    /// Sweep abstraction × relations × adjacency mode × support.
    Bench(BenchArgs),
    /// Generate synthetic data.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Raw CSV with entity, concept, timestamp and value columns.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AbstractionFlags {
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Knowledge base JSON (cutoffs and validity windows).
    #[arg(long)]
    pub kb: Option<PathBuf>,
    /// CSV `entity_id,context` selecting knowledge-base contexts.
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    /// Points per SAX averaging window.
    #[arg(long)]
    pub paa_window: Option<usize>,
    /// Percentile step of TD4C candidate cutoffs.
    #[arg(long)]
    pub percentile_step: Option<u32>,
    /// Validity before and after each point for concepts without a
    /// knowledge-base window.
    #[arg(long)]
    pub window: Option<i64>,
}

#[derive(Debug, Args)]
pub struct AbstractArgs {
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[command(flatten)]
    pub abstraction: AbstractionFlags,
    /// CSV `entity_id,label`; needed by supervised discretization.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Apply these cutoffs instead of learning new ones.
    #[arg(long)]
    pub cutoffs: Option<PathBuf>,
    /// Write the cutoffs that were used.
    #[arg(long)]
    pub cutoffs_out: Option<PathBuf>,
    /// Fold map; with --holdout, cutoffs are learned without that mining fold.
    #[arg(long)]
    pub folds: Option<PathBuf>,
    #[arg(long)]
    pub holdout: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MiningFlags {
    #[arg(long)]
    pub relations: Option<RelationMode>,
    #[arg(long)]
    pub sac: Option<SacMode>,
    /// Minimum vertical support as `P/Q` or a decimal.
    #[arg(long)]
    pub min_vs: Option<MinSupport>,
    /// Endpoint tolerance for relation classification.
    #[arg(long)]
    pub epsilon: Option<i64>,
    /// Largest gap still counted as `before`.
    #[arg(long)]
    pub max_gap: Option<i64>,
    /// Largest pattern size to mine.
    #[arg(long)]
    pub max_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub intervals: Option<PathBuf>,
    /// Labels; labelled entities without intervals still count as entities.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub mining: MiningFlags,
    /// Fold map; with --holdout, mining skips that mining fold.
    #[arg(long)]
    pub folds: Option<PathBuf>,
    #[arg(long)]
    pub holdout: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub tirps: Option<PathBuf>,
    #[arg(long)]
    pub intervals: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Overrides of the parameters recorded in the pattern file.
    #[command(flatten)]
    pub mining: MiningFlags,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub tirps: Option<PathBuf>,
    #[arg(long)]
    pub intervals: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub rep: Option<Representation>,
    #[command(flatten)]
    pub mining: MiningFlags,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FoldsArgs {
    #[arg(long)]
    pub intervals: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub mining_folds: Option<usize>,
    #[arg(long)]
    pub cv_folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Interval databases as `name=path` or `path` (named by file stem).
    #[arg(long)]
    pub intervals: Vec<String>,
    /// Points abstracted once per --method.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub kb: Option<PathBuf>,
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<i64>,
    #[arg(long, value_delimiter = ',')]
    pub relations: Vec<RelationMode>,
    #[arg(long, value_delimiter = ',')]
    pub sac: Vec<SacMode>,
    #[arg(long, value_delimiter = ',')]
    pub min_vs: Vec<MinSupport>,
    #[arg(long)]
    pub epsilon: Option<i64>,
    #[arg(long)]
    pub max_gap: Option<i64>,
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Symbolic intervals with planted patterns and contradictions.
    Intervals,
    /// Raw measurements with a class-discriminative episode.
    Points,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "intervals")]
    pub kind: GenKind,
    #[arg(long)]
    pub entities: Option<usize>,
    #[arg(long)]
    pub concepts: Option<usize>,
    #[arg(long)]
    pub values: Option<usize>,
    /// Number of planted patterns.
    #[arg(long)]
    pub planted: Option<usize>,
    #[arg(long)]
    pub pattern_size: Option<usize>,
    #[arg(long)]
    pub plant_rate: Option<f64>,
    /// Background intervals per entity.
    #[arg(long)]
    pub noise: Option<usize>,
    /// Fraction of planted gaps receiving a same-type intruder.
    #[arg(long)]
    pub contradiction_rate: Option<f64>,
    #[arg(long)]
    pub horizon: Option<i64>,
    /// Mean days between measurements (points only).
    #[arg(long)]
    pub sampling_interval: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_target(false)
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tirpmine: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
