//! Command-line front end: `polyweno run` executes a simulation and writes
//! the output bundle; `polyweno show-config` prints the fully resolved
//! configuration (useful as a starting config file).
//!
//! Exit codes: 0 completed, 1 IO failure, 2 configuration error,
//! 3 diverged (outputs are still written up to the failure time).

mod config;
mod output;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{print_config, RawConfig, ResolvedConfig};
use polyweno_core::sim::{run, Termination};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "polyweno",
    version,
    about = "Mass-conservative fifth-order solver for polymer size-distribution dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write the output bundle.
    Run(RunArgs),
    /// Print the fully resolved configuration and exit.
    ShowConfig(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file (all keys optional; defaults reproduce the
    /// baseline setup).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. --set eta=6 (repeatable, applied in order).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for the CSV/manifest bundle.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Suppress progress and warning messages.
    #[arg(long)]
    quiet: bool,
}

fn resolve(args: &ConfigArgs) -> Result<ResolvedConfig, String> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?,
        None => String::new(),
    };
    let mut raw = RawConfig::parse(&text).map_err(|e| e.to_string())?;
    for assignment in &args.set {
        raw.set(assignment).map_err(|e| e.to_string())?;
    }
    raw.build().map_err(|e| e.to_string())
}

fn run_command(args: &RunArgs) -> Result<ExitCode> {
    let cfg = match resolve(&args.config) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("error: {message}");
            return Ok(ExitCode::from(2));
        }
    };
    if !args.quiet {
        for warning in cfg.sim.rates.warnings() {
            eprintln!("warning: {warning}");
        }
    }
    let result = match run(&cfg.sim) {
        Ok(result) => result,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let paths = output::write_outputs(&cfg, &result, &args.out)
        .with_context(|| format!("writing outputs to {}", args.out.display()))?;
    match &result.termination {
        Termination::Completed => {
            if !args.quiet {
                let last = result.timeseries.last().expect("at least the initial row");
                eprintln!(
                    "completed: t = {} h in {} steps, V = {:.6} uM, {} files in {}",
                    last.t,
                    result.ode_history.len(),
                    last.v,
                    paths.len(),
                    args.out.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Termination::Diverged { reason, time } => {
            if !args.quiet {
                eprintln!("diverged at t = {time} h: {reason}");
                eprintln!("partial outputs written to {}", args.out.display());
            }
            Ok(ExitCode::from(3))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run_command(args),
        Command::ShowConfig(args) => match resolve(args) {
            Ok(cfg) => {
                print!("{}", print_config(&cfg));
                Ok(ExitCode::SUCCESS)
            }
            Err(message) => {
                eprintln!("error: {message}");
                Ok(ExitCode::from(2))
            }
        },
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
