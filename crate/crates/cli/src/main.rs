use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dipole_cli::commands;
use dipole_cli::config::{ConfigArgs, RunConfig};
use dipole_cli::spec::DirectionSpec;

/// Simulate multi-frequency far fields of dipole arrays and reconstruct
/// locations, types and strengths from sparse directions.
///
/// Thread count follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "dipole", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write noisy far-field measurements for a scene.
    Simulate(ConfigArgs),
    /// Locate dipoles and recover strengths from measurements.
    Reconstruct(ConfigArgs),
    /// Export the indicator field on the grid as CSV.
    Field(ConfigArgs),
    /// Compare a report with the true scene.
    Evaluate {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Matching radius. Defaults to one grid cell diagonal.
        #[arg(long)]
        radius: Option<f64>,
        /// Also write the per-dipole table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a direction set against the uniqueness conditions.
    CheckDirections {
        #[arg(long)]
        directions: DirectionSpec,
        /// Number of magnetic dipoles.
        #[arg(long)]
        m1: usize,
        /// Number of electric dipoles.
        #[arg(long)]
        m2: usize,
        /// Use the in-plane conditions.
        #[arg(long)]
        planar: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let s = commands::simulate(&cfg).context("simulate")?;
            println!("{s}");
        }
        Command::Reconstruct(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let report = commands::reconstruct(&cfg).context("reconstruct")?;
            println!(
                "recovered {} dipoles, {} unresolved",
                report.dipoles.len(),
                report.unresolved.len()
            );
            for u in &report.unresolved {
                eprintln!("warning: {} peak at {:?}: {}", u.kind, u.location.0, u.reason);
            }
        }
        Command::Field(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let field = commands::field(&cfg).context("field")?;
            println!("wrote {} nodes", field.grid().len());
        }
        Command::Evaluate { report, truth, radius, out } => {
            let eval = commands::evaluate(&report, &truth, radius, out.as_deref()).context("evaluate")?;
            println!("{eval}");
        }
        Command::CheckDirections { directions, m1, m2, planar } => {
            let c = commands::check(&directions, m1, m2, planar)?;
            println!("{}", commands::describe_check(&c));
            for w in c.warnings() {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
