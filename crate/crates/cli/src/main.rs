//! `emitgen` command-line interface.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use emitgen::graphs::GraphError;
use emitgen::search::SearchError;
use emitgen::solver::SolveError;

#[derive(Parser, Debug)]
#[command(
    name = "emitgen",
    version,
    about = "Emitter circuits for photonic graph states"
)]
pub struct Cli {
    /// Seed for verification streams and random search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for searches; 0 uses every core, 1 runs serially.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Directory receiving output files.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key = value` lines.
    Text,
    /// JSON.
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a graph file.
    Graph(GraphArgs),
    /// Solve one emission ordering and verify the circuit.
    Solve(SolveArgs),
    /// Search emission orderings and write histograms.
    Search(SearchArgs),
    /// Check a circuit against a graph.
    Verify(VerifyArgs),
    /// Print the closed-form CNOT bounds.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Ring,
    /// (2,2) Shor-encoded ring.
    Shor22,
    /// Leaf-truncated core of the encoded ring.
    Core,
    Path,
    /// Re-read and normalise an existing graph file.
    File,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(value_enum)]
    pub kind: GraphKind,
    /// Ring or path size, or the input path for `file`.
    pub arg: String,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "graph.toml")]
    pub out: String,
}

#[derive(Args, Debug, Clone)]
pub struct OrderingArgs {
    /// Comma- or space-separated 1-based list.
    #[arg(long, conflicts_with = "ordering_file")]
    pub ordering: Option<String>,
    /// File holding the list.
    #[arg(long)]
    pub ordering_file: Option<PathBuf>,
    /// Read the list as the emission time of each vertex instead of the
    /// vertex emitted at each time.
    #[arg(long)]
    pub times: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub ordering: OrderingArgs,
    /// Output circuit file name inside the output directory.
    #[arg(long, default_value = "circuit.txt")]
    pub out: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Random,
    Lifted,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Sample count for random mode.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Largest number of canonical orderings an exhaustive run accepts.
    #[arg(long, default_value_t = emitgen::search::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Checkpoint file for exhaustive runs (resumed when present).
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = emitgen::search::DEFAULT_CHECKPOINT_EVERY)]
    pub checkpoint_every: usize,
    /// Core cells to lift, as `emitters,cnots`; the best core cell otherwise.
    #[arg(long = "cell", value_parser = parse_cell)]
    pub cells: Vec<(usize, usize)>,
    /// Lifted mode: try every per-core leaf placement.
    #[arg(long)]
    pub per_leaf: bool,
    /// Verify every produced circuit.
    #[arg(long)]
    pub verify: bool,
    /// Also write `emitters cnots count` triples for plotting.
    #[arg(long)]
    pub emit_plot_data: bool,
    /// Prefix for output file names.
    #[arg(long, default_value = "histogram")]
    pub name: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    /// Ordering the circuit was built for; identity when omitted.
    #[command(flatten)]
    pub ordering: OrderingArgs,
    /// Compare the produced photonic state with the graph up to relabelling.
    #[arg(long)]
    pub up_to_isomorphism: bool,
    /// With `--up-to-isomorphism`, compare graph skeletons only.
    #[arg(long, requires = "up_to_isomorphism")]
    pub ignore_hadamards: bool,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    pub np: u64,
    pub ne: u64,
    #[arg(long)]
    pub n_trm: Option<u64>,
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `emitters,cnots`, got `{s}`"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(a)?, num(b)?))
}

/// Failures grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input. Exit 3.
    Parse(String),
    /// A circuit did not verify. Exit 4.
    Verification(String),
    /// Exhaustive search over budget. Exit 5.
    Budget(String),
    /// Anything else. Exit 1.
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Parse(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Budget(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m)
            | CliError::Verification(m)
            | CliError::Budget(m)
            | CliError::Other(m) => m,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Parse { .. }
            | SolveError::MalformedCircuit(_)
            | SolveError::OrderingMismatch { .. }
            | SolveError::Graph(_) => CliError::Parse(e.to_string()),
            SolveError::EmitterNotReset(_) => CliError::Verification(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            SearchError::Graph(g) => g.into(),
            SearchError::Solve(s) => s.into(),
            SearchError::Format(_) | SearchError::Checkpoint { .. } => {
                CliError::Parse(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
