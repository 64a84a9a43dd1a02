//! `airdrop-lab`: experiment runner for the airdrop-game model.
//!
//! Every subcommand reads a JSON experiment config (see
//! `docs/schema.json`), writes CSV/JSON artifacts into the output
//! directory, and prints a one-line machine-readable summary on stdout.
//! Exit codes: 2 parse error, 3 schema violation, 4 invariant violation,
//! 5 unsupported/resource, 6 I/O.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{load_config, CliError};
use output::{Format, OutputCtx};

#[derive(Parser)]
#[command(
    name = "airdrop-lab",
    version,
    about = "Airdrop-game analysis experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed override for stochastic experiments.
    #[arg(long)]
    seed: Option<u64>,
    /// Preferred summary format for experiments that support both.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Suppress timestamps so repeated runs are byte-identical.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Pure Nash equilibria, potential maximizers, and designer regimes.
    Equilibria(RunArgs),
    /// Closed-form stationary law of the lumped level chain.
    Stationary(RunArgs),
    /// Logit-dynamics trajectories, one CSV per (rho, seed).
    Simulate(RunArgs),
    /// Monte Carlo first-passage estimates to a contribution target.
    Hitting(RunArgs),
    /// Success probability across an airdrop grid, critical point marked.
    Phase(RunArgs),
    /// Expected-profit curve and the optimal airdrop fraction.
    Profit(RunArgs),
    /// Mixing/hitting bounds and exact expectations, optionally with
    /// Monte Carlo columns.
    Times(RunArgs),
}

impl Command {
    fn kind_name(&self) -> &'static str {
        match self {
            Command::Equilibria(_) => "equilibria",
            Command::Stationary(_) => "stationary",
            Command::Simulate(_) => "simulate",
            Command::Hitting(_) => "hitting",
            Command::Phase(_) => "phase",
            Command::Profit(_) => "profit",
            Command::Times(_) => "times",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Equilibria(a)
            | Command::Stationary(a)
            | Command::Simulate(a)
            | Command::Hitting(a)
            | Command::Phase(a)
            | Command::Profit(a)
            | Command::Times(a) => a,
        }
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("AIRDROP_LAB_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                // Ignore failure: the pool may already be initialized.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let command = &cli.command;
    let args = command.args();
    let loaded = load_config(&args.config)?;
    if loaded.file.experiment.kind_name() != command.kind_name() {
        return Err(CliError::Schema(format!(
            "experiment kind `{}` in {} does not match subcommand `{}`",
            loaded.file.experiment.kind_name(),
            args.config.display(),
            command.kind_name()
        )));
    }
    let io = OutputCtx::new(&args.out, args.format, args.reproducible, &loaded.hash)?;
    let summary = experiments::run(&loaded.game, &loaded.file.experiment, args.seed, &io)?;
    let report = json!({
        "command": command.kind_name(),
        "config_hash": loaded.hash,
        "outputs": io.written_files(),
        "summary": summary,
    });
    println!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
