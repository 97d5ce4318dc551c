use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use gawcga_cli::error::EXIT_CONFIG;
use gawcga_cli::{cmd_check, cmd_modulus, cmd_run, cmd_sweep, cmd_witness, CliError, Overrides, RunConfig};

/// Greedy approximation runs, divergence witnesses and condition checks.
///
/// Exit codes: 0 success, 1 config or parse error, 2 constraint violation,
/// 3 solver failure, 4 invalid construction, 5 witness predicate failed.
#[derive(Debug, Parser)]
#[command(name = "gawcga", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: gawcga-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    max_steps: Option<usize>,

    #[arg(long, global = true)]
    stop_tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured element (or witness) and write trace.csv and summary.json.
    Run,
    /// Build, run and check a named witness: unbounded-eta, finite-lambda1, infinite-lambda1, smooth-space.
    Witness { name: String },
    /// Write the condition report of the configured schedules.
    Check,
    /// Tabulate a modulus of smoothness and solve for xi.
    Modulus,
    /// Run a cartesian grid of constant schedules and write sweep.csv.
    Sweep,
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides { out: cli.out.clone(), seed: cli.seed, max_steps: cli.max_steps, stop_tol: cli.stop_tol })?;
    match &cli.command {
        Command::Run => cmd_run(&cfg),
        Command::Witness { name } => cmd_witness(name, &cfg),
        Command::Check => cmd_check(&cfg),
        Command::Modulus => cmd_modulus(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
