//! `check` and `prox-selftest`.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use irksn::conditions::{analyze, ConditionOptions};
use irksn::datagen::{gen_correlated, gen_example1, gen_example2, SyntheticSpec};
use irksn::io::{read_instance, write_instance};
use irksn::ksupport::oracle::{self_test, SelfTestConfig};
use irksn::{Instance, Truth};

use crate::Global;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Example1,
    Example2,
    Correlated,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Instance file with ground truth.
    #[arg(long, conflicts_with = "generator", required_unless_present = "generator")]
    pub instance_file: Option<PathBuf>,

    /// Generate the instance instead of reading it.
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,

    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub d: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub snr: f64,

    /// Also write the checked instance to this file.
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
}

fn load(global: &Global, args: &CheckArgs) -> Result<(Instance, Truth, Option<u64>)> {
    if let Some(path) = &args.instance_file {
        let file = read_instance::<f64>(path).with_context(|| format!("reading {}", path.display()))?;
        let Some(truth) = file.truth else {
            bail!("{} has no ground truth (w_star and support); the conditions need w*", path.display());
        };
        return Ok((file.instance, truth, file.seed));
    }
    let seed = global.seed.unwrap_or(crate::example1::DEFAULT_SEED);
    let (inst, truth) = match args.generator {
        Some(Generator::Example1) => gen_example1(seed)?,
        Some(Generator::Example2) => gen_example2(args.n, args.d, args.k, seed)?,
        Some(Generator::Correlated) => {
            gen_correlated(&SyntheticSpec { n: args.n, d: args.d, k_true: args.k, rho: args.rho, snr: args.snr, seed })?
        }
        None => bail!("either --instance-file or --generator is required"),
    };
    Ok((inst, truth, Some(seed)))
}

pub fn check(global: &Global, args: &CheckArgs) -> Result<()> {
    let (inst, truth, seed) = load(global, args)?;
    let out = global.out_dir(None)?;
    if let Some(path) = &args.save_instance {
        write_instance(path, &inst, Some(&truth), seed).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = analyze(&inst, &truth, &ConditionOptions::default())?;
    let text = report.to_kv_string();
    print!("{text}");
    let path = out.join("conditions.toml");
    std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 12)]
    pub dim_max: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn prox_selftest(global: &Global, args: &SelftestArgs) -> Result<()> {
    let config = SelfTestConfig { trials: args.trials, dim_max: args.dim_max, seed: global.seed.unwrap_or(0), tol: args.tol };
    let s = self_test(&config)?;
    println!("checks = {}", s.checks);
    println!("failures = {}", s.failures.len());
    println!("max_objective_gap = {:e}", s.max_objective_gap);
    println!("max_fenchel_young_gap = {:e}", s.max_fenchel_young_gap);
    println!("max_theta_sum_error = {:e}", s.max_theta_sum_error);
    println!("max_nonexpansive_excess = {:e}", s.max_nonexpansive_excess);
    println!("max_norm_mismatch = {:e}", s.max_norm_mismatch);
    for f in &s.failures {
        eprintln!("FAILED {f}");
    }
    if !s.passed() {
        bail!("{} of {} checks failed", s.failures.len(), s.checks);
    }
    println!("PASS");
    Ok(())
}
