mod bench;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Parser)]
#[command(name = "rwap", version, about = "Routing and wavelength assignment with dedicated protection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Base,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Da,
    Rs,
    Exact,
    Bnb,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance on a topology file or a synthetic topology.
    Gen {
        /// A JSON file `{nodes, links}` or `synth:<nodes>,<edges per node>`.
        #[arg(long)]
        topology: String,
        #[arg(long)]
        wavelengths: usize,
        #[arg(long)]
        requests: usize,
        /// Working and protection paths sampled per request.
        #[arg(long)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Conflict set sizes and constraint-per-variable ratios of both models.
    Conflicts {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Objective weights: M, the base weight and optionally the tight weight.
    Weights {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        alpha: i64,
        /// Also enumerate grant levels to compute the tight weight.
        #[arg(long)]
        tight: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the integer program in LP format.
    ExportLp {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ModelArg::Base)]
        model: ModelArg,
        #[arg(long)]
        alpha: Option<i64>,
        #[arg(long)]
        beta: Option<i64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the QUBO as `n constant` followed by `i j coeff` lines.
    ExportQubo {
        instance: PathBuf,
        /// Penalty coefficient; defaults to the smallest exact one.
        #[arg(long)]
        rho: Option<i64>,
        #[arg(long)]
        alpha: Option<i64>,
        #[arg(long)]
        beta: Option<i64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build the instance whose request optimum is a maximum stable set of a graph.
    ReduceMss {
        graph: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run several methods over several instances and seeds.
    Bench(bench::BenchArgs),
}

#[derive(clap::Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    pub iterations: u64,
    #[arg(long, default_value_t = 8)]
    pub replicas: usize,
    /// Penalty coefficient for annealing; defaults to beta + 100.
    #[arg(long)]
    pub rho: Option<i64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Best-energy trace as CSV `iteration,best_energy` (annealer only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Permutations evaluated by the heuristic.
    #[arg(long, default_value_t = 7243)]
    pub budget: u64,
    /// Search-node budget for branch-and-bound.
    #[arg(long)]
    pub node_limit: Option<u64>,
    #[arg(long)]
    pub alpha: Option<i64>,
    #[arg(long)]
    pub beta: Option<i64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("RWAP_THREADS") {
        let threads: usize = value.parse().with_context(|| format!("RWAP_THREADS={value} is not a count"))?;
        anyhow::ensure!(threads > 0, "RWAP_THREADS must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Gen { topology, wavelengths, requests, paths, seed, output } => {
            commands::gen(&topology, wavelengths, requests, paths, seed, &output)
        }
        Command::Conflicts { instance, format } => commands::conflicts(&instance, format),
        Command::Weights { instance, alpha, tight, format } => commands::weights(&instance, alpha, tight, format),
        Command::ExportLp { instance, model, alpha, beta, output } => {
            commands::export_lp(&instance, model, alpha, beta, &output)
        }
        Command::ExportQubo { instance, rho, alpha, beta, output } => {
            commands::export_qubo(&instance, rho, alpha, beta, &output)
        }
        Command::Solve(args) => commands::solve(&args),
        Command::Verify { instance, solution, format } => commands::verify(&instance, &solution, format),
        Command::ReduceMss { graph, output } => commands::reduce_mss(&graph, &output),
        Command::Bench(args) => bench::run(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
