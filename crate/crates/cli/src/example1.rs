//! `example1`: the five-column illustrating example end to end.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use irksn::conditions::{analyze, ConditionOptions};
use irksn::datagen::gen_example1;
use irksn::harness::{DECADES, PATH_EPS, PATH_POINTS};
use irksn::io::write_metric_csv;
use irksn::metrics::{extract_path, find_exchange, path_rows, MetricRow};
use irksn::solvers::{
    elasticnet_path, iht, ircr, irksn, irosr, lambda_grid, lasso_path, srdi, IhtConfig, IrcrConfig, IrksnConfig, IrosrConfig, PathConfig,
    PathPoint, Schedule, SrdiConfig,
};
use irksn::{Run, Truth};
use log::warn;

use crate::svg::{FigureKind, FigureSpec, Series};
use crate::Global;

/// Seed of the bundled Example 1 draw.
pub const DEFAULT_SEED: u64 = 1;
/// Sparsity level of the example.
pub const K: usize = 3;
/// ElasticNet mixing ratio used for the example's path.
pub const ENET_RATIO: f64 = 0.8;

#[derive(Debug, Args)]
pub struct Example1Args {
    /// IRKSN parameter (default: half of alpha_max).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
}

fn write_coefficients(path: &Path, header: &str, rows: impl Iterator<Item = (f64, Vec<f64>)>, d: usize) -> Result<()> {
    let mut s = String::from(header);
    for j in 0..d {
        let _ = write!(s, ",w{j}");
    }
    s.push('\n');
    for (at, w) in rows {
        let _ = write!(s, "{at}");
        for v in w {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

/// Lowest model error reached by `rows`.
fn min_err(rows: &[MetricRow]) -> f64 {
    rows.iter().map(|r| r.err2).fold(f64::INFINITY, f64::min)
}

/// Runs every grid cell and keeps the one with the lowest model error.
fn best_cell(name: &str, truth: &Truth, seed: u64, runs: Vec<irksn::Result<Run>>) -> Option<Vec<MetricRow>> {
    let mut best: Option<Vec<MetricRow>> = None;
    for run in runs {
        match run {
            Ok(run) => {
                let rows = extract_path(&run, truth, seed);
                if best.as_ref().is_none_or(|b| min_err(&rows) < min_err(b)) {
                    best = Some(rows);
                }
            }
            Err(e) => warn!("{name} cell skipped: {e}"),
        }
    }
    best
}

fn series_of(name: &str, rows: &[MetricRow], y: impl Fn(&MetricRow) -> f64) -> Series {
    Series::new(name, rows.iter().map(|r| r.at).collect(), rows.iter().map(y).collect())
}

fn path_series(prefix: &str, points: &[PathPoint<f64>], lmax: f64, d: usize) -> Vec<Series> {
    // increasing x: −log10(λ/λ_max)
    let x: Vec<f64> = points.iter().map(|p| -(p.lambda / lmax).log10()).collect();
    (0..d).map(|j| Series::new(format!("{prefix} w{j}"), x.clone(), points.iter().map(|p| p.w[j]).collect())).collect()
}

pub fn run(global: &Global, args: &Example1Args) -> Result<()> {
    if args.iters < 2 {
        bail!("iters must be ≥ 2");
    }
    if args.record_every == 0 {
        bail!("record-every must be ≥ 1");
    }
    let seed = global.seed.unwrap_or(DEFAULT_SEED);
    let out = global.out_dir(None)?;
    let (inst, truth) = gen_example1::<f64>(seed)?;
    let d = inst.d();

    let report = analyze(&inst, &truth, &ConditionOptions::default())?;
    std::fs::write(out.join("conditions.toml"), report.to_kv_string())?;
    let alpha = match (args.alpha, report.alpha_max) {
        (Some(a), _) => a,
        (None, Some(am)) => 0.5 * am.min(1.0),
        (None, None) => bail!("alpha_max is undefined for this draw; pass --alpha"),
    };

    let schedule = Schedule::new(args.iters, args.record_every);
    let run = irksn(&inst, &IrksnConfig::new(K, alpha, args.iters).record_every(args.record_every))?;
    let irksn_rows = extract_path(&run, &truth, seed);
    write_metric_csv(&out.join("irksn.csv"), &irksn_rows)?;
    write_coefficients(&out.join("irksn_coefficients.csv"), "iter", run.snapshots.iter().map(|s| (s.t as f64, s.w.to_vec())), d)?;

    let mut curves: Vec<(&str, Vec<MetricRow>)> = vec![("irksn", irksn_rows)];
    let with = |mut s: Schedule| {
        s.record_every = schedule.record_every;
        s
    };
    let iht_runs = DECADES
        .iter()
        .map(|&eta| {
            let mut c = IhtConfig::new(K, eta, args.iters);
            c.schedule = with(c.schedule);
            iht(&inst, &c)
        })
        .collect();
    let grid2 = |f: &dyn Fn(f64, f64) -> irksn::Result<Run>| {
        DECADES.iter().flat_map(|&a| DECADES.iter().map(move |&b| (a, b))).map(|(a, b)| f(a, b)).collect()
    };
    let srdi_runs = grid2(&|kappa, a| {
        let mut c = SrdiConfig::new(kappa, a, args.iters);
        c.schedule = with(c.schedule);
        srdi(&inst, &c)
    });
    let irosr_runs = grid2(&|eta, a| {
        let mut c = IrosrConfig::new(eta, a, args.iters);
        c.schedule = with(c.schedule);
        irosr(&inst, &c)
    });
    let mut ircr_cfg = IrcrConfig::new(args.iters);
    ircr_cfg.schedule = with(ircr_cfg.schedule);
    for (name, runs) in [("iht", iht_runs), ("srdi", srdi_runs), ("irosr", irosr_runs), ("ircr", vec![ircr(&inst, &ircr_cfg)])] {
        match best_cell(name, &truth, seed, runs) {
            Some(rows) => {
                write_metric_csv(&out.join(format!("{name}.csv")), &rows)?;
                curves.push((name, rows));
            }
            None => warn!("every {name} cell failed"),
        }
    }

    let path_cfg = PathConfig::default();
    let lasso_l = lambda_grid(&inst, 1.0, PATH_POINTS, PATH_EPS)?;
    let lasso = lasso_path(&inst, &lasso_l, &path_cfg)?;
    let enet_l = lambda_grid(&inst, ENET_RATIO, PATH_POINTS, PATH_EPS)?;
    let enet = elasticnet_path(&inst, &enet_l, ENET_RATIO, &path_cfg)?;
    let lasso_rows = path_rows("lasso", &lasso, &truth, seed);
    let enet_rows = path_rows("elasticnet", &enet, &truth, seed);
    write_metric_csv(&out.join("lasso_path.csv"), &lasso_rows)?;
    write_metric_csv(&out.join("elasticnet_path.csv"), &enet_rows)?;
    write_coefficients(&out.join("lasso_coefficients.csv"), "lambda", lasso.iter().map(|p| (p.lambda, p.w.to_vec())), d)?;
    write_coefficients(&out.join("elasticnet_coefficients.csv"), "lambda", enet.iter().map(|p| (p.lambda, p.w.to_vec())), d)?;

    let mut fig = FigureSpec::new(FigureKind::Path, "IRKSN path", "iteration", "coefficient", "path_irksn.svg");
    let ts: Vec<f64> = run.snapshots.iter().map(|s| s.t as f64).collect();
    for j in 0..d {
        fig.push(Series::new(format!("w{j}"), ts.clone(), run.snapshots.iter().map(|s| s.w[j]).collect()));
    }
    fig.write(&out)?;

    let mut fig =
        FigureSpec::new(FigureKind::Path, "Lasso and ElasticNet paths", "-log10(lambda/lambda_max)", "coefficient", "path_l1.svg");
    for s in path_series("lasso", &lasso, lasso_l[0], d).into_iter().chain(path_series("enet", &enet, enet_l[0], d)) {
        fig.push(s);
    }
    fig.write(&out)?;

    let mut err = FigureSpec::new(FigureKind::ErrorVsIter, "Model error", "iteration", "||w - w*||", "error_vs_iter.svg");
    let mut spars = FigureSpec::new(FigureKind::SparsityVsIter, "Sparsity", "iteration", "nonzeros", "sparsity_vs_iter.svg");
    for (name, rows) in &curves {
        err.push(series_of(name, rows, |r| r.err2));
        spars.push(series_of(name, rows, |r| r.sparsity as f64));
    }
    err.write(&out)?;
    spars.write(&out)?;

    println!("{}", report.to_kv_string().trim_end());
    println!("alpha = {alpha}");
    for (name, rows) in &curves {
        let last = rows.last().map(|r| (r.err2, r.sparsity)).unwrap_or((f64::NAN, 0));
        println!("{name}: min_error = {:e}, final_error = {:e}, final_sparsity = {}", min_err(rows), last.0, last.1);
    }
    println!("lasso: min_error = {:e}", min_err(&lasso_rows));
    println!("elasticnet: min_error = {:e}", min_err(&enet_rows));
    let exchange = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .find_map(|(i, j)| find_exchange(&run, i, j, 1000).map(|(a, b)| (i, j, a, b)));
    if let Some((i, j, a, b)) = exchange {
        println!("exchange: w{i} leaves and w{j} enters between t = {a} and t = {b}");
    }
    Ok(())
}
