//! `synthetic` and `bound-verify`.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use irksn::harness::{
    run_sweep, sample_bound_cases, verify_bound_sweep, write_aggregate_csv, write_sweep_csv, write_trace_csv, AggregateResult, AlphaSpec,
    BoundOptions, CaseFamilies, ExperimentConfig,
};

use crate::svg::{FigureKind, FigureSpec, Series};
use crate::Global;

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: PathBuf,
}

pub fn synthetic(global: &Global, args: &SyntheticArgs) -> Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = global.seed {
        config.base_seed = seed;
    }
    let out = global.out_dir(config.output_dir.as_ref())?;
    let result = run_sweep(&config, global.jobs)?;
    let name = &config.name;
    write_sweep_csv(&out.join(format!("{name}_seeds.csv")), &result)?;
    write_aggregate_csv(&out.join(format!("{name}_aggregate.csv")), &result)?;

    let var = result.variable.as_str();
    let mut fig =
        FigureSpec::new(FigureKind::F1VsParam, &format!("{name}: support F1"), var, "best F1", &format!("{name}_f1_vs_{var}.svg"));
    let mut algorithms: Vec<_> = result.rows.iter().map(|r| r.algorithm).collect();
    algorithms.dedup();
    for a in algorithms {
        let mut rows = result.series(a);
        rows.sort_by(|x, y| x.value.total_cmp(&y.value));
        fig.push(
            Series::new(a.as_str(), rows.iter().map(|r| r.value).collect(), rows.iter().map(|r| r.mean_f1).collect())
                .with_band(rows.iter().map(|r| r.std_f1).collect()),
        );
    }
    fig.write(&out)?;
    if result.rows.iter().any(|r| r.per_seed.iter().any(|u| !u.trace.is_empty())) {
        write_trace_csv(&out.join(format!("{name}_f1_vs_iter.csv")), &result)?;
        write_trace_figures(&out, name, &result)?;
    }

    println!("algorithm,{var},mean_f1,std_f1,mean_final_f1");
    for r in &result.rows {
        println!("{},{},{:.4},{:.4},{:.4}", r.algorithm, r.value, r.mean_f1, r.std_f1, r.mean_final_f1);
    }
    Ok(())
}

/// Mean and std of the traced F1 over seeds, one figure per sweep value.
fn write_trace_figures(out: &std::path::Path, name: &str, result: &AggregateResult) -> Result<()> {
    let mut values: Vec<f64> = result.rows.iter().map(|r| r.value).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    for value in &values {
        let file =
            if values.len() == 1 { format!("{name}_f1_vs_iter.svg") } else { format!("{name}_f1_vs_iter_{}{value}.svg", result.variable) };
        let title = format!("{name}: support F1, {} = {value}", result.variable);
        let mut fig = FigureSpec::new(FigureKind::F1VsParam, &title, "iteration", "F1", &file);
        for row in result.rows.iter().filter(|r| r.value == *value) {
            let traces: Vec<&Vec<(usize, f64)>> = row.per_seed.iter().map(|u| &u.trace).collect();
            let len = traces.iter().map(|t| t.len()).min().unwrap_or(0);
            if len == 0 {
                continue;
            }
            let x: Vec<f64> = traces[0][..len].iter().map(|p| p.0 as f64).collect();
            let seeds = traces.len() as f64;
            let mut mean = vec![0.0; len];
            let mut std = vec![0.0; len];
            for i in 0..len {
                let m = traces.iter().map(|t| t[i].1).sum::<f64>() / seeds;
                mean[i] = m;
                std[i] = (traces.iter().map(|t| (t[i].1 - m).powi(2)).sum::<f64>() / seeds).sqrt();
            }
            fig.push(Series::new(row.algorithm.as_str(), x, mean).with_band(std));
        }
        if !fig.series.is_empty() {
            fig.write(out)?;
        }
    }
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}`"))).collect()
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Number of base instances.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    /// Comma-separated noise levels applied to every base instance.
    #[arg(long, default_value = "0,0.01,0.1")]
    pub deltas: String,
    /// `α` as a fraction of `min(1, alpha_max)`.
    #[arg(long, default_value_t = 0.5)]
    pub alpha_fraction: f64,
    /// Constant of the stopping time.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    /// Allowed negative slack.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

pub fn bound_verify(global: &Global, args: &BoundArgs) -> Result<()> {
    if args.iters < 2 {
        bail!("iters must be ≥ 2");
    }
    let deltas = parse_list(&args.deltas)?;
    let cases = sample_bound_cases(args.cases, &deltas, global.seed.unwrap_or(0), &CaseFamilies::default())?;
    let options = BoundOptions { max_iter: args.iters, c: args.c, ..Default::default() };
    let report = verify_bound_sweep(&cases, &[AlphaSpec::FractionOfMax(args.alpha_fraction)], &options)?;
    let path = global.out_dir(None)?.join("bound.csv");
    std::fs::write(&path, report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    let failing = report.rows.iter().filter(|r| !r.holds(args.tol)).count();
    println!("runs = {}", report.rows.len());
    println!("min_slack = {:e}", report.min_slack());
    println!("violations = {failing}");
    if failing > 0 {
        bail!("bound violated in {failing} of {} runs", report.rows.len());
    }
    Ok(())
}
