//! Command-line surface: three subcommands sharing data, pool, and solver
//! flag groups.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "epp",
    about = "Personalized ensemble pruning: one bagged pool, one Pareto front, one pruned ensemble per participant",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a bagged tree pool and write its prediction matrices.
    Train(TrainArgs),
    /// Prune the pool into per-participant ensembles.
    Prune(PruneArgs),
    /// Sweep participant counts and compare the framework variants.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Labeled CSV file to load.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,

    /// Generate synthetic data instead: rows,attributes,classes.
    #[arg(long, value_name = "R,A,K", value_parser = parse_usize_triple)]
    pub synthetic: Option<(usize, usize, usize)>,

    /// Label column name (needs a header) or zero-based index.
    /// Defaults to the last column.
    #[arg(long, value_name = "NAME|INDEX")]
    pub label_col: Option<String>,

    /// Treat the first CSV row as a header.
    #[arg(long)]
    pub has_header: bool,

    /// Train/validation/test fractions.
    #[arg(long, value_name = "TR,VA,TE", default_value = "0.6,0.2,0.2", value_parser = parse_f64_triple)]
    pub split: (f64, f64, f64),

    #[arg(long, default_value_t = 17)]
    pub split_seed: u64,

    /// Stratify the split by class (off by default).
    #[arg(long)]
    pub stratify: bool,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    /// Pool size: number of bagged trees.
    #[arg(long, default_value_t = 20)]
    pub m: usize,

    #[arg(long, default_value_t = 8)]
    pub max_depth: usize,

    #[arg(long, default_value_t = 2)]
    pub min_leaf: usize,

    #[arg(long, default_value_t = 42)]
    pub pool_seed: u64,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Iteration budget of the bi-objective solver.
    #[arg(long, default_value_t = 80)]
    pub iterations: usize,

    #[arg(long, default_value_t = 7)]
    pub solver_seed: u64,

    /// Lower multiplicative relaxation factor of the objective mixture.
    #[arg(long, default_value_t = 0.3)]
    pub cmin: f64,

    /// Upper multiplicative relaxation factor of the objective mixture.
    #[arg(long, default_value_t = 1.7)]
    pub cmax: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub pool: PoolArgs,

    /// Output directory for pool.json and the prediction matrices.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Skip training: load a prediction-matrix CSV directly.
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,

    #[command(flatten)]
    pub pool: PoolArgs,

    #[command(flatten)]
    pub solver: SolverArgs,

    /// Which pruning strategy to run.
    #[arg(long, value_enum, default_value_t = Variant::Bf)]
    pub variant: Variant,

    /// Participant count when sampling levels from --alpha-range.
    #[arg(long)]
    pub n: Option<usize>,

    /// Explicit trade-off levels, e.g. 0.1,0.029.
    #[arg(long, value_name = "A1,A2,...", value_parser = parse_f64_list)]
    pub alphas: Option<Vec<f64>>,

    /// Sample trade-off levels uniformly from LOW,HIGH.
    #[arg(long, value_name = "LOW,HIGH", value_parser = parse_f64_pair)]
    pub alpha_range: Option<(f64, f64)>,

    #[arg(long, default_value_t = 23)]
    pub alpha_seed: u64,

    /// Selection rule: Algorithm-2 sorted sweep or exact argmin.
    #[arg(long, value_enum, default_value_t = SelectKind::Sorted)]
    pub select: SelectKind,

    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Skip training: load a prediction-matrix CSV directly.
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,

    #[command(flatten)]
    pub pool: PoolArgs,

    #[command(flatten)]
    pub solver: SolverArgs,

    /// Variants to benchmark (defaults to all three).
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Variant::Bf, Variant::Omf, Variant::Peps])]
    pub variant: Vec<Variant>,

    /// Participant counts to sweep.
    #[arg(
        long,
        value_name = "N1,N2,...",
        value_parser = parse_usize_list,
        default_value = "1,2,3,4,5,6,7,8,9,10,20,40,80,160,320,640,1280"
    )]
    pub n: Vec<usize>,

    /// Trade-off level range sampled per participant count.
    #[arg(long, value_name = "LOW,HIGH", default_value = "0.01,0.2", value_parser = parse_f64_pair)]
    pub alpha_range: (f64, f64),

    #[arg(long, default_value_t = 23)]
    pub alpha_seed: u64,

    #[arg(long, value_enum, default_value_t = SelectKind::Sorted)]
    pub select: SelectKind,

    /// Timed repetitions per configuration.
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,

    /// Run repetitions concurrently (never parallelizes within a timed run).
    #[arg(long)]
    pub parallel: bool,

    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    /// Basic framework: one plain bi-objective solve, then selection.
    Bf,
    /// Objective-mixture framework: fold the level range into both objectives.
    Omf,
    /// Baseline: one bi-objective solve per participant.
    Peps,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Bf => "bf",
            Variant::Omf => "omf",
            Variant::Peps => "peps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectKind {
    Sorted,
    Exact,
}

fn split_terms(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).collect()
}

pub fn parse_usize_triple(s: &str) -> Result<(usize, usize, usize), String> {
    match split_terms(s).as_slice() {
        [a, b, c] => Ok((
            a.parse().map_err(|e| format!("{a:?}: {e}"))?,
            b.parse().map_err(|e| format!("{b:?}: {e}"))?,
            c.parse().map_err(|e| format!("{c:?}: {e}"))?,
        )),
        _ => Err("expected three comma-separated integers".into()),
    }
}

pub fn parse_f64_triple(s: &str) -> Result<(f64, f64, f64), String> {
    match split_terms(s).as_slice() {
        [a, b, c] => Ok((
            a.parse().map_err(|e| format!("{a:?}: {e}"))?,
            b.parse().map_err(|e| format!("{b:?}: {e}"))?,
            c.parse().map_err(|e| format!("{c:?}: {e}"))?,
        )),
        _ => Err("expected three comma-separated numbers".into()),
    }
}

pub fn parse_f64_pair(s: &str) -> Result<(f64, f64), String> {
    match split_terms(s).as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|e| format!("{a:?}: {e}"))?,
            b.parse().map_err(|e| format!("{b:?}: {e}"))?,
        )),
        _ => Err("expected two comma-separated numbers".into()),
    }
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    split_terms(s)
        .iter()
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    split_terms(s)
        .iter()
        .map(|t| t.parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}
