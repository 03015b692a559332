mod commands;
mod config;
mod error;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, Kind};

#[derive(Debug, Parser)]
#[command(name = "qfconv", version, about = "Frequency-conversion entanglement simulation workflows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; the bundled default is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master RNG seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Conversion efficiency, background and SNR against pump power.
    SweepPump(commands::sweep::Args),
    /// Simulated and fitted coincidence-delay histograms.
    JitterHist(commands::jitter::Args),
    /// Tomography count table for one detector scenario.
    Simulate(commands::simulate::Args),
    /// MLE state reconstruction with bootstrap uncertainties.
    Reconstruct(commands::reconstruct::Args),
    /// Consolidated metrics table from reconstruct manifests.
    Report(commands::report::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Kind::Usage.exit_code() } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.kind.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::usage(e.to_string()))?;

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::usage(format!("cannot create output directory {}: {e}", cli.out.display())))?;
    let loaded = config::load(cli.config.as_deref())?;
    let ctx = commands::Context {
        seed: cli.seed.unwrap_or(loaded.config.seed),
        loaded,
        out: cli.out,
        svg: cli.svg,
    };
    pool.install(|| match cli.command {
        Command::SweepPump(a) => commands::sweep::run(&ctx, a),
        Command::JitterHist(a) => commands::jitter::run(&ctx, a),
        Command::Simulate(a) => commands::simulate::run(&ctx, a),
        Command::Reconstruct(a) => commands::reconstruct::run(&ctx, a),
        Command::Report(a) => commands::report::run(&ctx, a),
    })
}
