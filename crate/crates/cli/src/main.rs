mod campaigns;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqaoa::campaign::Fidelity;
use dqaoa::{Error, ErrorKind};
use serde_json::json;

/// Data-driven QAOA for weighted Max-Cut with density-based parameter transfer.
///
/// Graphs, parameter databases and power-flow cases are versioned JSON files
/// (`schema_version: 1`). A graph is `{"n": N, "edges": [[i, j, w], ...]}`
/// with weights in (0, 1]. Result tables are CSV with the columns
/// graph_ref, density, p, method, mean_ratio, best_ratio, shots, seed,
/// wall_time.
///
/// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
/// Failures print one JSON line `{"error": kind, "message": ...}` on stderr.
#[derive(Debug, Parser)]
#[command(name = "dqaoa", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Base seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// Shot budget: quick (2048 shots) or campaign (2^19 shots).
    #[arg(long, global = true, value_enum, default_value_t = FidelityArg::Quick)]
    pub fidelity: FidelityArg,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write zero wall times so outputs are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

impl Global {
    pub fn shots(&self) -> u64 {
        match self.fidelity {
            FidelityArg::Quick => Fidelity::Quick.shots(),
            FidelityArg::Campaign => Fidelity::Campaign.shots(),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FidelityArg {
    Quick,
    Campaign,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a density-spanning suite of non-planar random graphs.
    GenGraphs(pipeline::GenGraphs),
    /// Exact Max-Cut by enumeration.
    MaxcutExact(pipeline::GraphOnly),
    /// Optimize seed graphs and add their parameters to a database.
    OptimizeSeeds(pipeline::OptimizeSeeds),
    /// Build mapping tables from the database's seeds onto target graphs.
    BuildTable(pipeline::BuildTable),
    /// Transfer parameters to a new graph, optionally refining them.
    Transfer(pipeline::Transfer),
    /// Run a noiseless QAOA circuit and sample it.
    RunQaoa(pipeline::RunQaoa),
    /// Run a QAOA circuit under depolarizing noise.
    RunNoisy(pipeline::RunNoisy),
    /// Goemans-Williamson relaxation and hyperplane rounding.
    Gw(pipeline::Gw),
    /// Transferred, random and GW ratios on one graph.
    Compare(pipeline::Compare),
    /// Solve a power-flow case and write its line-loading graph.
    PfWeights(pipeline::PfWeights),
    /// Inspect or extend a parameter database.
    #[command(subcommand)]
    Db(pipeline::DbCommand),
    /// Desk-scale experiment campaigns.
    #[command(subcommand)]
    Campaign(campaigns::CampaignCommand),
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T = ()> = std::result::Result<T, CliError>;

fn run(cli: Cli) -> CliResult {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    let g = &cli.global;
    match cli.command {
        Command::GenGraphs(a) => pipeline::gen_graphs(g, a),
        Command::MaxcutExact(a) => pipeline::maxcut_exact(a),
        Command::OptimizeSeeds(a) => pipeline::optimize_seeds(g, a),
        Command::BuildTable(a) => pipeline::build_table(a),
        Command::Transfer(a) => pipeline::transfer(g, a),
        Command::RunQaoa(a) => pipeline::run_qaoa(g, a),
        Command::RunNoisy(a) => pipeline::run_noisy(g, a),
        Command::Gw(a) => pipeline::gw(g, a),
        Command::Compare(a) => pipeline::compare(g, a),
        Command::PfWeights(a) => pipeline::pf_weights(a),
        Command::Db(c) => pipeline::db(c),
        Command::Campaign(c) => campaigns::run(g, c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (kind, message, code) = match err {
                CliError::Usage(m) => ("usage", m, 2),
                CliError::Core(e) => match e.kind() {
                    ErrorKind::Data => ("data", e.to_string(), 3),
                    ErrorKind::Numeric => ("numeric", e.to_string(), 4),
                },
            };
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(code)
        }
    }
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

/// File stem used as a graph reference.
pub fn graph_ref(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn print_json(value: &serde_json::Value) {
    print_text(&format!("{}\n", serde_json::to_string_pretty(value).expect("JSON values always serialize")));
}

/// Writes to stdout, ignoring a closed pipe.
pub fn print_text(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn write_text(path: &PathBuf, text: &str) -> CliResult {
    dqaoa::io::write_atomic(path, text.as_bytes())?;
    Ok(())
}
