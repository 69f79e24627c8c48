//! `mpr`: census, motif matrices, ranking and evaluation from the command
//! line.
//!
//! Exit status is 0 on success, 1 when a computation fails and 2 for usage
//! or input errors.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Marks an error caused by the invocation or its input files.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Parser, Debug)]
#[command(name = "mpr", version, about = "Rank nodes of directed networks with motif-based PageRank")]
pub struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Refuse to draw a random seed when none is given.
    #[arg(long, global = true)]
    pub reproducible: bool,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Subgraph census: class weights, concentrations and Z-scores.
    Census(CensusArgs),
    /// Write a motif-based adjacency matrix in coordinate format.
    MotifMatrix(MotifMatrixArgs),
    /// Rank nodes with motif-based PageRank or a baseline.
    Rank(RankArgs),
    /// NDCG of ranking methods against ground truth.
    Eval(EvalArgs),
    /// NDCG over a grid of alpha values.
    Sweep(SweepArgs),
    /// Per-node degree and path features of W or a combined matrix.
    Features(FeaturesArgs),
    /// Node count, edge count, density and ingestion counters.
    Stats(StatsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge list: `src<TAB>dst[<TAB>weight]` per line.
    #[arg(short, long, value_name = "FILE")]
    pub input: PathBuf,

    /// Read the third column as an edge weight.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted. Relative paths are
    /// resolved under `$MPR_OUTPUT_DIR` when it is set.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PageRankArgs {
    /// Damping factor d in (0, 1).
    #[arg(long)]
    pub damping: Option<f64>,
    /// L1 change between iterates at which PageRank stops.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Node count above which betweenness and closeness are sampled.
    #[arg(long)]
    pub exact_node_cap: Option<usize>,
    /// BFS sources used when sampling path centralities.
    #[arg(long)]
    pub pivots: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CensusOptions {
    /// `exact` enumeration or `sampled` edge expansion.
    #[arg(long, value_name = "METHOD")]
    pub census: Option<String>,
    /// Expansion attempts for sampled censuses.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Abort exact enumeration beyond this many subgraphs.
    #[arg(long)]
    pub max_subgraphs: Option<u64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct MotifArgs {
    /// `simple:1`..`simple:7`, `anchor:1`..`anchor:13`, `ensemble` or
    /// `sampled:<class id>`.
    #[arg(long)]
    pub motif: Option<String>,
    /// How sampled-class instances become matrix entries: `direct` or
    /// `anchor`.
    #[arg(long)]
    pub counting: Option<String>,
    #[command(flatten)]
    pub census: CensusOptions,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CombinationArgs {
    /// `linear` or `nonlinear`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Weight of edge relations in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Subgraph size, 3 to 5.
    #[arg(short)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub census: CensusOptions,
    /// Also compute Z-scores against degree-preserving randomizations.
    #[arg(long)]
    pub zscore: bool,
    /// Randomized networks for Z-scores.
    #[arg(long)]
    pub random_networks: Option<usize>,
    /// Swap attempts per edge when randomizing.
    #[arg(long)]
    pub swap_factor: Option<f64>,
    /// Write the instances of every class to this file.
    #[arg(long, value_name = "FILE")]
    pub instances: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MotifMatrixArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub motif: MotifArgs,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub motif: MotifArgs,
    #[command(flatten)]
    pub combination: CombinationArgs,
    /// Rank with IND, BET, CLO, BPR or WPR instead of a motif.
    #[arg(long, conflicts_with = "motif")]
    pub baseline: Option<String>,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
    /// Number of nodes to report.
    #[arg(short, long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Ground truth: `node_id<TAB>score` per line.
    #[arg(short, long, value_name = "FILE")]
    pub relevance: PathBuf,
    /// Comma-separated methods, e.g. `BPR,mpr:simple:7:linear:0.5`.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Comma-separated list of K.
    #[arg(short, long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// `local` (retrieved items) or `global` (whole table) ideal ranking.
    #[arg(long)]
    pub idcg: Option<String>,
    /// Add paired t-tests of every method against `--reference`.
    #[arg(long)]
    pub significance: bool,
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Share of nodes kept in each subsample.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// `paired` or `welch`.
    #[arg(long)]
    pub test: Option<String>,
    /// Append an alpha sweep `start:end:step` for `--motif`/`--mode`.
    #[arg(long, value_name = "GRID")]
    pub sweep_alpha: Option<String>,
    #[command(flatten)]
    pub motif: MotifArgs,
    #[command(flatten)]
    pub combination: CombinationArgs,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(short, long, value_name = "FILE")]
    pub relevance: PathBuf,
    /// Alpha grid `start:end:step`.
    #[arg(long, value_name = "GRID")]
    pub alphas: Option<String>,
    #[arg(short, long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub idcg: Option<String>,
    #[command(flatten)]
    pub motif: MotifArgs,
    #[command(flatten)]
    pub combination: CombinationArgs,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Extract from the combination of W with this motif instead of W.
    #[command(flatten)]
    pub motif: MotifArgs,
    #[command(flatten)]
    pub combination: CombinationArgs,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<InputError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<mpr_core::Error>() {
            use mpr_core::Error::*;
            return match e {
                Io(_) | Numerical(_) | WorkCapExceeded(_) => 1,
                Parse { .. } | Invalid(_) | DimensionMismatch { .. } | WeightedGraph | OutOfRange(_)
                | Unsupported(_) => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
