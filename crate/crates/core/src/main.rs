use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use dvqtf::sweep::{self, ResultTable, SweepConfig};

#[derive(Parser)]
#[command(
    name = "dvqtf",
    version,
    about = "Sequential Bell-state target finding: bounds and Monte Carlo sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep: analytic columns plus Monte Carlo estimates.
    Simulate {
        #[command(flatten)]
        io: IoArgs,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; overrides the config.
        #[arg(long, env = "DVQTF_WORKERS")]
        workers: Option<usize>,
    },
    /// Analytic columns only, no simulation.
    Bounds {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; defaults to the config's output_path, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the table as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn load(path: &Path) -> Result<SweepConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    sweep::parse_config(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn emit(table: &ResultTable, config: &SweepConfig, io: &IoArgs) -> Result<()> {
    match io.out.as_ref().or(config.output_path.as_ref()) {
        Some(path) => sweep::write_csv(table, path)?,
        None => sweep::write_csv_to(table, io::stdout().lock())?,
    }
    if let Some(path) = &io.json {
        sweep::write_json(table, path)?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { io, seed, workers } => {
            let mut config = load(&io.config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(workers) = workers {
                anyhow::ensure!(workers >= 1, "--workers must be >= 1");
                config.workers = workers;
            }
            let table = sweep::run_sweep(&config);
            emit(&table, &config, &io)?;
            if let Some(bad) = table.rows.iter().find_map(|r| r.error.as_deref()) {
                eprintln!("warning: some rows recorded errors, e.g. {bad}");
            }
        }
        Command::Bounds { io } => {
            let config = load(&io.config)?;
            emit(&sweep::run_bounds(&config), &config, &io)?;
        }
    }
    Ok(())
}
