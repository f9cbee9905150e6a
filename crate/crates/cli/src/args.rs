use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "stablematch", version, about = "Stable matchings with random exponential edge costs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Total matching cost over replicates.
    SimulateCost(SimulateCost),
    /// n times the cost of a uniformly chosen matching edge.
    TypicalCost(TypicalCost),
    /// Rank of every vertex's matching edge on sampled graphs.
    Rank(Rank),
    /// Limiting rank and its reference table.
    PwitRank(PwitRank),
    /// Truncated PWIT sizes and the root's matching cost.
    PwitTree(PwitTree),
    /// Overlap of the matchings before and after perturbation.
    Overlap(Overlap),
    /// Whether the most expensive edges survive a perturbation.
    Tail(Tail),
    /// Correlation of total costs before and after perturbation.
    NoiseCorr(NoiseCorr),
    /// Matching costs with one vertex removed interlace the original ones.
    Interlacing(Interlacing),
    /// Brute-force count of stable matchings on small graphs.
    Oracle(Oracle),
    /// Dump one sampled graph with its greedy matching.
    DumpGraph(DumpGraph),
    /// Run the acceptance suite.
    Verify(Verify),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Master seed; every replicate stream is derived from it.
    #[arg(long)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Write per-replicate rows here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Write the JSON summary here.
    #[arg(long)]
    #[serde(skip)]
    pub json: Option<PathBuf>,
    /// Add wall-clock time to the JSON summary (makes it non-reproducible).
    #[arg(long)]
    #[serde(skip)]
    pub record_runtime: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Bipartite,
    Complete,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Bipartite => "bipartite",
            Kind::Complete => "complete",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Sample every edge cost and run the greedy algorithm.
    FullGraph,
    /// O(n) exponential representation of the cost process.
    Exact,
    /// O(n) joint sampler of pairs and costs.
    Direct,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::FullGraph => "full-graph",
            Engine::Exact => "exact",
            Engine::Direct => "direct",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// Costs with mean 1.
    Unit,
    /// Costs with mean n.
    MeanN,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateCost {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "bipartite")]
    pub kind: Kind,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub engine: Engine,
    /// Allow odd n for complete graphs (one vertex stays unmatched).
    #[arg(long)]
    pub allow_odd: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TypicalCost {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "bipartite")]
    pub kind: Kind,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 20_000)]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub engine: Engine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Rank {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "bipartite")]
    pub kind: Kind,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "full-graph")]
    pub engine: Engine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PwitRank {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1_000_000)]
    pub reps: u64,
    /// Give up on a replicate after this many arrivals.
    #[arg(long, default_value_t = 1_000_000)]
    pub j_max: u64,
    /// Largest r in the reference table.
    #[arg(long, default_value_t = 20)]
    pub r_max: u32,
    /// Monte Carlo replicates behind the reference table.
    #[arg(long, default_value_t = 1_000_000)]
    pub reference_reps: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PwitTree {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Ceiling of the truncation.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 10_000_000)]
    pub node_cap: usize,
    /// Write the first replicate's tree as `parent,cost` lines in preorder.
    #[arg(long)]
    #[serde(skip)]
    pub dump_tree: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Overlap {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Comma-separated grid.
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,0.5,1")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "full-graph")]
    pub engine: Engine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Tail {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "300,1000,3000")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 200)]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "full-graph")]
    pub engine: Engine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NoiseCorr {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "100,1000,3000")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "full-graph")]
    pub engine: Engine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Interlacing {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "bipartite")]
    pub kind: Kind,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Oracle {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "bipartite")]
    pub kind: Kind,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub reps: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DumpGraph {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "bipartite")]
    pub kind: Kind,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "unit")]
    pub scale: Scale,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Verify {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "quick")]
    pub level: Level,
}
