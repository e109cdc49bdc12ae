//! Declarative experiment runner: parse a config, dispatch to the right
//! pipeline, emit CSV / plot-data artifacts with full provenance.
//!
//! Exit codes: 0 ok, 2 config error, 3 runtime failure.

// `!(x > 0.0)`-style validation is intentional: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod manifest;
mod pipelines;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use pipelines::RunError;

#[derive(Parser)]
#[command(name = "dampwave", version, about = "Damped wave equation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (flat key-value text with sections)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir from the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and scans (defaults to all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Seed override for randomized sample sets
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever command the config names
    Run(RunArgs),
    /// Exact linear decay rates against the theory bounds
    LinearDecay(RunArgs),
    /// Fractional heat decay in the dyadic norm
    HeatDecay(RunArgs),
    /// One semilinear Hartree solve
    Semilinear(RunArgs),
    /// Criticality sweep over (p1, p2)
    Sweep(RunArgs),
    /// Dyadic block energies and Besov/heat norms of a data profile
    BesovNorm(RunArgs),
    /// Empirical multiplier-bound scan
    BoundsScan(RunArgs),
    /// Hardy-Littlewood-Sobolev and Gagliardo-Nirenberg ratio scans
    Inequalities(RunArgs),
    /// Weak-form functional on a solved trajectory
    WeakFunctional(RunArgs),
}

impl Command {
    fn expected(&self) -> Option<&'static str> {
        match self {
            Command::Run(_) => None,
            Command::LinearDecay(_) => Some("linear-decay"),
            Command::HeatDecay(_) => Some("heat-decay"),
            Command::Semilinear(_) => Some("semilinear"),
            Command::Sweep(_) => Some("sweep"),
            Command::BesovNorm(_) => Some("besov-norm"),
            Command::BoundsScan(_) => Some("bounds-scan"),
            Command::Inequalities(_) => Some("inequalities"),
            Command::WeakFunctional(_) => Some("weak-functional"),
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Run(a)
            | Command::LinearDecay(a)
            | Command::HeatDecay(a)
            | Command::Semilinear(a)
            | Command::Sweep(a)
            | Command::BesovNorm(a)
            | Command::BoundsScan(a)
            | Command::Inequalities(a)
            | Command::WeakFunctional(a) => a,
        }
    }
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let args = cli.command.args();
    let config = ExperimentConfig::load(&args.config)?;
    let command = config.command()?;
    if let Some(expected) = cli.command.expected() {
        if command != expected {
            return Err(RunError::Config(format!(
                "config names command {command}, but the {expected} subcommand was invoked"
            )));
        }
    }
    if let Some(threads) = args.threads {
        // already-initialized pools are fine; only the first call wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let seed = match args.seed {
        Some(s) => s,
        None => match config.opt_str("experiment.seed") {
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| RunError::Config(format!("bad experiment.seed {s}")))?,
            None => 0,
        },
    };
    let out_dir = match &args.out {
        Some(dir) => dir.clone(),
        None => PathBuf::from(config.opt_str("output.dir").unwrap_or("runs/out")),
    };
    let files = pipelines::run_config(&config, &out_dir, seed)?;
    println!("{}: {} artifacts in {}", command, files.len(), out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("config-error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("runtime-error: {msg}");
            ExitCode::from(3)
        }
    }
}
