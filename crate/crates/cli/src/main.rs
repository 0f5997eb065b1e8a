use std::path::PathBuf;
use std::process::ExitCode;

use bihns_cli::config::{Mode, Overrides};
use bihns_cli::{main_with, thread_cap, EXIT_INVALID_CONFIG, THREADS_VAR};
use clap::Parser;

/// Solver and verification lab for the biharmonic Schrödinger equation on (0,1).
#[derive(Parser, Debug)]
#[command(name = "bihns", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    mode: Mode,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random ensembles (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_INVALID_CONFIG } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let var = std::env::var(THREADS_VAR).ok();
    match thread_cap(var.as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID_CONFIG as u8);
        }
    }
    let overrides = Overrides {
        out: cli.out,
        seed: cli.seed,
    };
    ExitCode::from(main_with(cli.mode, &cli.config, &overrides) as u8)
}
