//! `cutofflab`: command-line front end for the cut-off laboratory.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid configuration or
//! unwritable output.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{resolve, Command, FileConfig, Params, TolFlags};
use error::CliError;
use output::OutputDir;

const DEFAULT_OUT: &str = "cutofflab-out";

#[derive(Debug, Parser)]
#[command(name = "cutofflab", version, about = "Laplacian cut-off laboratory on radial model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory [default: $CUTOFFLAB_OUT, then the config file, then ./cutofflab-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML config with shared keys and one section per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    tol: TolFlags,
}

fn run(cli: Cli) -> Result<(PathBuf, Option<String>), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = resolve(cli.command, &file, &cli.params, &cli.tol)?;
    let root = cli
        .out
        .or_else(|| std::env::var_os("CUTOFFLAB_OUT").map(PathBuf::from))
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut out = OutputDir::create(&root, &cfg)?;
    let failure = match cli.command {
        Command::Geometry => commands::geometry(&cfg, &mut out),
        Command::Cutoff => commands::cutoff(&cfg, &mut out),
        Command::Lyau => commands::lyau(&cfg, &mut out),
        Command::Diffusion => commands::diffusion(&cfg, &mut out),
        Command::VerifyAll => commands::verify_all(&cfg, &mut out),
    }?;
    Ok((out.finish()?, failure))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((dir, None)) => {
            println!("ok: outputs in {}", dir.display());
            ExitCode::SUCCESS
        }
        Ok((dir, Some(detail))) => {
            eprintln!("verification failed: {detail}");
            eprintln!("outputs in {}", dir.display());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
