//! Command-line grammar. Exit codes: 0 success, 1 usage or input-format
//! problems, 2 verification found conflicts (or a scan found violations),
//! 3 structural guard rejected the graph, 4 time or budget limit hit.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "chromadist",
    version,
    about = "Distance-r palette-distinguishing edge colourings: \
             generate, solve, construct, verify, certify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph (or graph stream) as an edge-list file
    Gen(GenArgs),
    /// Properly edge-colour a graph with at most Δ+1 colours
    Colour(ColourArgs),
    /// Exact value of the distinguishing index by branch and bound
    Solve(SolveArgs),
    /// Check a colouring file for properness and distance-r palette clashes
    Verify(VerifyArgs),
    /// Run a resampling construction and write the colouring it finds
    Construct(ConstructArgs),
    /// Exact-arithmetic certificates and inequality checks
    Certificate(CertificateArgs),
    /// Solve every graph in a stream and flag values above a bound
    Scan(ScanArgs),
    /// Frequency census of the resampling trigger events
    Census(CensusArgs),
    /// Pinned benchmark grids with byte-reproducible CSV reports
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Cycle,
    Complete,
    Star,
    /// d-regular from the pairing model
    Regular,
    /// Word-overlap graph on t-ary words of length k
    DeBruijn,
    /// Clique-decorated backbone witnessing the counting lower bound
    LowerBound,
    /// Every connected graph on 2..=max-n vertices, one per isomorphism class
    Corpus,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Vertex count (path, cycle, complete, star, regular)
    #[arg(long)]
    pub n: Option<u32>,
    /// Degree (regular)
    #[arg(long)]
    pub d: Option<u32>,
    /// Alphabet size (de-bruijn)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: Option<u32>,
    /// Word length (de-bruijn)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: Option<u32>,
    /// Distance parameter (lower-bound)
    #[arg(long)]
    pub r: Option<u32>,
    /// Scale factor N (lower-bound)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n_scale: u32,
    /// Largest order included (corpus)
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(2..=6))]
    pub max_n: u32,
    /// RNG seed (regular); falls back to CHROMADIST_SEED, then entropy
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output edge-list file; corpus writes a stream of graphs
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColourMethod {
    Vizing,
}

#[derive(Debug, Args)]
pub struct ColourArgs {
    #[arg(long, value_enum, default_value_t = ColourMethod::Vizing)]
    pub method: ColourMethod,
    /// Write the colouring here (default: input path with extension .col)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Graph file
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    /// Most-constrained edge first
    Degeneracy,
    /// Edges exactly as listed
    Input,
    /// Edges in many same-degree pairs first
    MaxConflict,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Distance parameter
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Largest colour budget to try
    #[arg(long, default_value_t = 64)]
    pub kmax: u32,
    /// Time budget in seconds
    #[arg(long, default_value_t = 30.0)]
    pub time: f64,
    #[arg(long, value_enum, default_value_t = OrderArg::Degeneracy)]
    pub order: OrderArg,
    /// Write the witness colouring here when one is found
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Graph file
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Distance parameter
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Cap on conflicts listed in the report (all are still counted)
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
    /// Graph file
    pub graph: PathBuf,
    /// Colouring file, one line per edge in edge-id order
    pub colouring: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructMethod {
    /// Two-stage resampling for near-regular graphs
    Dense,
    /// Class-partition pipeline for large maximum degree
    Asymptotic,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub method: ConstructMethod,
    /// Distance parameter
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Minimum-to-maximum degree ratio as an exact fraction, e.g. 1 or 1/2 (dense)
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    /// RNG seed; falls back to CHROMADIST_SEED, then entropy
    #[arg(long)]
    pub seed: Option<u64>,
    /// Resampling budget (default: 50 per edge)
    #[arg(long)]
    pub max_resamples: Option<u64>,
    /// Write the colouring here (default: input path with extension .col)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Graph file
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertificateArgs {
    /// Distance parameter
    #[arg(long)]
    pub r: u32,
    /// Scale factor N of the counting instance
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_scale: u64,
    /// Extra colours above the instance maximum degree
    #[arg(long, default_value_t = 0)]
    pub c: u64,
    /// Sweep N = 1..=MAX and emit one CSV row per scale
    #[arg(long, value_name = "MAX")]
    pub sweep_n: Option<u64>,
    /// Find the least N at which the certificate verdict turns true
    #[arg(long)]
    pub threshold: bool,
    /// Search cap for --threshold
    #[arg(long, default_value_t = 10_000)]
    pub threshold_cap: u64,
    /// Check the growth margin that makes the certificate win for large r
    #[arg(long)]
    pub margin: bool,
    /// Check the exponential-sum inequalities at this fraction, e.g. 1/4
    #[arg(long, value_name = "FRACTION")]
    pub technical_epsilon: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Distance parameter
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Bound to test: delta-plus-2, or an integer C meaning Δ+C
    #[arg(long, default_value = "delta-plus-2")]
    pub bound: String,
    /// Per-graph time budget in seconds
    #[arg(long, default_value_t = 10.0)]
    pub time: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Graph-stream file
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Distance parameter
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Degree-ratio fraction used to derive the trigger thresholds
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// RNG seed; falls back to CHROMADIST_SEED, then entropy
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Graph file
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Dense pipeline across a d × r grid of random regular graphs
    RegularSweep,
    /// Exact values versus Δ+2 over the small connected corpus
    ConjectureScan,
    /// Event frequencies across graph sizes
    CensusSweep,
    /// Counting-certificate verdicts across scales for r = 7, 8, 9
    CertificateSweep,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Master seed; falls back to CHROMADIST_SEED, then entropy
    #[arg(long)]
    pub seed: Option<u64>,
    /// Graph-stream file for conjecture-scan (default: built-in corpus)
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}
