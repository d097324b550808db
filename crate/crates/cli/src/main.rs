mod commands;
mod config;
mod error;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use crate::config::{Command, FileConfig, Overrides, RunConfig};
use crate::error::{CliResult, Failure};

/// Extended Dicke quantum battery simulator.
#[derive(Debug, Parser)]
#[command(name = "qb", version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: qb-out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; QB_THREADS caps this
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

fn thread_count(requested: Option<usize>) -> CliResult<Option<usize>> {
    let cap = match std::env::var("QB_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&k| k > 0)
                .ok_or_else(|| Failure::Environment(format!("QB_THREADS must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    if requested == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    Ok(match (requested, cap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    })
}

fn execute(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(cli.command, file, &cli.overrides, cli.out, cli.threads)?;
    if let Some(k) = thread_count(cfg.threads)? {
        qbattery::exec::configure_threads(k);
    }
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Failure::io(&cfg.output_dir, e))?;

    let outcome = commands::run(&cfg)?;
    outcome.bundle.write(&cfg.output_dir)?;
    for path in outcome.bundle.paths() {
        eprintln!("wrote {}", cfg.output_dir.join(path).display());
    }
    println!("{}", outcome.summary);
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            if f.exit_code() == 1 {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
