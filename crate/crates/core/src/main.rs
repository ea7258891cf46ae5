use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nonlocal_spectrum::cli::{error_json, run_command, Command};
use nonlocal_spectrum::config::load_config;

/// Spectral analysis and extinction dynamics of non-local operators on the
/// torus.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; `fixtures/F1` .. `fixtures/F4` are built in.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match load_config(&args.config).and_then(|c| c.with_overrides(args.seed, args.grid_n)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            return ExitCode::from(e.class().exit_code() as u8);
        }
    };
    let out = args.out.unwrap_or_else(|| config.output.dir.clone());
    ExitCode::from(run_command(args.command, &config, &out) as u8)
}
