//! Experiment driver for sparse private ERM. Three subcommands: `run`
//! (config-driven excess-risk sweeps), `inspect-norm` (geometry of a single
//! penalty), and `gen` (synthetic datasets as CSV).
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure at runtime.

mod config;
mod gen;
mod inspect;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Anything that should stop the process, tagged with the exit code the
/// interface promises.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "sparsedp", version, about = "Sparse private ERM experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the excess-risk experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for results.csv and summary.json.
        #[arg(long)]
        out: PathBuf,
        /// Fill the runtime_ms column. Off by default so identical runs
        /// produce byte-identical output.
        #[arg(long)]
        timings: bool,
    },
    /// Report the width, vertices, and norm identities of a penalty.
    InspectNorm {
        /// Set function: cardinality, trunc:<k>, or sqrt.
        #[arg(long)]
        f: config::PenaltyKind,
        /// Ground-set size.
        #[arg(long)]
        p: usize,
        /// Monte Carlo samples for the width estimate.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic dataset as CSV.
    Gen {
        /// Task family: lasso_synthetic or linf_synthetic.
        #[arg(long)]
        task: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out, timings } => run::run(&config, &out, timings),
        Command::InspectNorm { f, p, samples, seed } => {
            inspect::inspect(&f, p, samples, seed).and_then(|r| inspect::print_report(&r))
        }
        Command::Gen { task, p, n, seed, out } => gen::generate(&task, p, n, seed, &out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
