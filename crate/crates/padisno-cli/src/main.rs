use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use padisno::solver::Termination;
use padisno_cli::config::ExperimentConfig;
use padisno_cli::{fig1, rates, restore, solve, CliError};

/// Inertial forward-backward experiments: composite minimization with two
/// independent (possibly negative) extrapolation coefficients.
#[derive(Parser)]
#[command(name = "padisno", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured solve and write trajectory.csv.
    Solve {
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the 2-D parameter grid and write one CSV per cell plus
    /// summary.csv.
    Fig1 {
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Restore a blurred, salt-and-pepper-corrupted image; writes
    /// isnr.csv, observed.pgm and restored.pgm.
    Restore {
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Classify the convergence regime of a trajectory CSV.
    Rates {
        /// Trajectory CSV produced by `solve`.
        #[arg(long)]
        csv: PathBuf,
        /// Known limit objective value to subtract.
        #[arg(long)]
        target: f64,
    },
}

fn load_config(
    path: &PathBuf,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<ExperimentConfig, CliError> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve {
            config,
            output_dir,
            seed,
        } => {
            let config = load_config(&config, output_dir, seed)?;
            let outcome = solve::cmd_solve(&config)?;
            eprintln!(
                "solve: {:?} after writing {}",
                outcome.termination,
                outcome.csv_path.display()
            );
            Ok(if outcome.termination == Termination::MaxIters {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Fig1 { output_dir } => {
            fig1::cmd_fig1(&output_dir)?;
            eprintln!("fig1: wrote grid results to {}", output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Restore {
            config,
            output_dir,
            seed,
        } => {
            let config = load_config(&config, output_dir, seed)?;
            restore::cmd_restore(&config)?;
            eprintln!("restore: wrote results to {}", config.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Rates { csv, target } => {
            let json = rates::cmd_rates(&csv, target)?;
            println!("{json}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
