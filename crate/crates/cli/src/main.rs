mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nehari_core::verify::{Level, VerifyOptions};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Ground states of coupled nonlinear Schrödinger systems.
#[derive(Debug, Parser)]
#[command(name = "nehari", version)]
struct Cli {
    /// Worker threads for parallel solves (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one ground state and write its profile and report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.directory`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve along a parameter axis and write one CSV row per point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the coupling thresholds for every combination of the values given.
    Thresholds {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        q: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        omega: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<usize>,
        /// Also write `thresholds.csv` to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        /// Override the number of grid points of every grid.
        #[arg(long)]
        num_points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write `verify.json` to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::InvalidConfig(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Solve { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.directory.clone());
            commands::solve(&cfg, &dir)
        }
        Command::Sweep { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.directory.clone());
            commands::sweep(&cfg, &dir)
        }
        Command::Thresholds { q, omega, n, out } => commands::thresholds(&q, &omega, &n, out.as_deref()),
        Command::Verify { level, num_points, seed, out } => {
            let mut opts = VerifyOptions {
                level: match level {
                    LevelArg::Fast => Level::Fast,
                    LevelArg::Full => Level::Full,
                },
                num_points,
                ..Default::default()
            };
            if let Some(seed) = seed {
                opts.seed = seed;
            }
            commands::verify(&opts, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
