use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fourier_lab_cli::config::{ExperimentConfig, Overrides};
use fourier_lab_cli::{plot, run, CliError};

/// Numerical laboratory for rearranged and sign-flipped Fourier series.
#[derive(Parser)]
#[command(name = "fourier-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: config file, then FOURIER_LAB_WORKERS, then 1).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render two CSV columns as an SVG line chart.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            workers,
            out,
        } => {
            let overrides = Overrides {
                seed,
                workers,
                output_dir: out,
            };
            let cfg = ExperimentConfig::load(&config, &overrides)?;
            let m = run(&cfg)?;
            println!(
                "{}: {} checks passed, outputs in {}",
                m.experiment,
                m.summary.checks,
                cfg.output_dir.display()
            );
            Ok(())
        }
        Command::Plot { csv, x, y, out } => plot::plot_file(&csv, &x, &y, &out),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("hint: {h}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
