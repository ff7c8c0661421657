//! `irksn` command-line front end.

mod check;
mod example1;
mod experiments;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "irksn", version, about = "Sparse recovery with iterative k-support norm regularization")]
struct Cli {
    /// Seed from which all randomness of the command is derived.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Maximum number of parallel work units (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Illustrating example: condition values, paths, error and sparsity curves.
    Example1(example1::Example1Args),
    /// Multi-seed F1 sweep from a config file.
    Synthetic(experiments::SyntheticArgs),
    /// Condition report for an instance file or a generated instance.
    Check(check::CheckArgs),
    /// Randomised prox and norm oracle battery.
    ProxSelftest(check::SelftestArgs),
    /// Numerical check of the early-stopping bound.
    BoundVerify(experiments::BoundArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Global {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Global {
    pub fn out_dir(&self, fallback: Option<&PathBuf>) -> Result<PathBuf> {
        let dir = self.out.clone().or_else(|| fallback.cloned()).unwrap_or_else(|| PathBuf::from("out"));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let global = Global { seed: cli.seed, jobs: cli.jobs, out: cli.out };
    match cli.command {
        Command::Example1(a) => example1::run(&global, &a),
        Command::Synthetic(a) => experiments::synthetic(&global, &a),
        Command::Check(a) => check::check(&global, &a),
        Command::ProxSelftest(a) => check::prox_selftest(&global, &a),
        Command::BoundVerify(a) => experiments::bound_verify(&global, &a),
    }
}
