//! Multi-seed sweeps over one design variable.

use std::io::Write;
use std::path::Path;

use log::info;
use rayon::prelude::*;

use super::config::{ExperimentConfig, SweepVariable};
use super::grid::{f1_trace, run_grid, Algorithm, Grid, GridOptions, GridOutcome};
use crate::datagen::{gen_correlated, sub_seed, SyntheticSpec};
use crate::metrics::MetricRow;
use crate::{Error, Result};

/// Best row of one (algorithm, sweep value, seed) unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedBest {
    pub algorithm: Algorithm,
    pub value: f64,
    pub seed: u64,
    /// Seed passed to the generator.
    pub instance_seed: u64,
    pub outcome: GridOutcome,
    /// `(t, F1)` of the winning cell, when tracing was requested.
    pub trace: Vec<(usize, f64)>,
}

/// Statistics over seeds for one (algorithm, sweep value).
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub value: f64,
    pub mean_f1: f64,
    /// Population standard deviation.
    pub std_f1: f64,
    pub min_f1: f64,
    pub max_f1: f64,
    pub mean_final_f1: f64,
    pub per_seed: Vec<SeedBest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub variable: SweepVariable,
    pub rows: Vec<AggregateRow>,
}

impl AggregateResult {
    pub fn row(&self, algorithm: Algorithm, value: f64) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.value == value)
    }

    /// Rows of one algorithm in sweep order.
    pub fn series(&self, algorithm: Algorithm) -> Vec<&AggregateRow> {
        self.rows.iter().filter(|r| r.algorithm == algorithm).collect()
    }
}

/// Generator seed for configured seed `seed` under `base`.
pub fn instance_seed(base: u64, seed: u64) -> u64 {
    sub_seed(seed, base)
}

/// Generator parameters for one sweep value.
pub fn spec_for(config: &ExperimentConfig, value: f64, seed: u64) -> SyntheticSpec {
    let f = &config.fixed;
    let mut spec = SyntheticSpec {
        n: f.n.unwrap_or(0),
        d: f.d,
        k_true: f.k,
        rho: f.rho.unwrap_or(0.0),
        snr: f.snr.unwrap_or(1.0),
        seed: instance_seed(config.base_seed, seed),
    };
    match config.sweep.variable {
        SweepVariable::N => spec.n = value as usize,
        SweepVariable::Snr => spec.snr = value,
        SweepVariable::Rho => spec.rho = value,
    }
    spec
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates unit results; input order does not matter.
pub fn aggregate(variable: SweepVariable, mut units: Vec<SeedBest>, value_order: &[f64], algorithm_order: &[Algorithm]) -> AggregateResult {
    let pos = |xs: &[f64], v: f64| xs.iter().position(|x| *x == v).unwrap_or(usize::MAX);
    let apos = |a: Algorithm| algorithm_order.iter().position(|x| *x == a).unwrap_or(usize::MAX);
    units.sort_by_key(|u| (apos(u.algorithm), pos(value_order, u.value), u.seed));
    let mut rows: Vec<AggregateRow> = Vec::new();
    for chunk in units.chunk_by(|a, b| a.algorithm == b.algorithm && a.value == b.value) {
        let f1: Vec<f64> = chunk.iter().map(|u| u.outcome.best.f1).collect();
        let finals: Vec<f64> = chunk.iter().map(|u| u.outcome.final_f1).collect();
        let (mean_f1, std_f1) = mean_std(&f1);
        rows.push(AggregateRow {
            algorithm: chunk[0].algorithm,
            value: chunk[0].value,
            mean_f1,
            std_f1,
            min_f1: f1.iter().copied().fold(f64::INFINITY, f64::min),
            max_f1: f1.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_final_f1: mean_std(&finals).0,
            per_seed: chunk.to_vec(),
        });
    }
    AggregateResult { variable, rows }
}

/// Runs every (sweep value, seed, algorithm) unit, at most `jobs` at a time
/// (`None` uses every core).
pub fn run_sweep(config: &ExperimentConfig, jobs: Option<usize>) -> Result<AggregateResult> {
    config.validate()?;
    let grids = config.grids()?;
    let mut units = Vec::new();
    for &value in &config.sweep.values {
        for &seed in &config.seeds {
            for grid in &grids {
                units.push((value, seed, grid));
            }
        }
    }
    let work = |(value, seed, grid): &(f64, u64, &Grid)| -> Result<SeedBest> {
        let spec = spec_for(config, *value, *seed);
        let (instance, truth) = gen_correlated::<f64>(&spec)?;
        let options = GridOptions { max_iter: config.max_iter, seed: *seed, selection: config.selection() };
        let outcome = run_grid(&instance, &truth, grid, &options)?;
        let trace = match config.trace_every {
            Some(every) if grid.algorithm.is_iterative() => {
                let cell: Vec<(String, f64)> =
                    outcome.best.params.iter().filter(|(n, _)| grid.algorithm.param_names().contains(&n.as_str())).cloned().collect();
                f1_trace(&instance, &truth, grid.algorithm, &cell, config.max_iter, every)?
            }
            _ => Vec::new(),
        };
        info!(
            "{} {}={} seed={} best f1={} at {}",
            grid.algorithm,
            config.sweep.variable,
            value,
            seed,
            outcome.best.f1,
            outcome.best.param_string()
        );
        Ok(SeedBest { algorithm: grid.algorithm, value: *value, seed: *seed, instance_seed: spec.seed, outcome, trace })
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let results: Vec<SeedBest> = pool.install(|| units.par_iter().map(work).collect::<Result<_>>())?;
    let order: Vec<Algorithm> = grids.iter().map(|g| g.algorithm).collect();
    Ok(aggregate(config.sweep.variable, results, &config.sweep.values, &order))
}

pub const TRACE_CSV_HEADER: &str = "variable,value,algorithm,seed,iter,f1";

/// F1 traces of the winning cells, one row per traced iterate.
pub fn write_trace_csv(path: &Path, result: &AggregateResult) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{TRACE_CSV_HEADER}")?;
    for row in &result.rows {
        for u in &row.per_seed {
            for (t, f1) in &u.trace {
                writeln!(f, "{},{},{},{},{t},{f1}", result.variable, u.value, u.algorithm, u.seed)?;
            }
        }
    }
    f.flush()?;
    Ok(())
}

pub const SWEEP_CSV_HEADER: &str = "variable,value,algorithm,seed,instance_seed,params,iter,f1,precision,recall,err2,sparsity,final_f1";
pub const AGGREGATE_CSV_HEADER: &str = "variable,value,algorithm,mean_f1,std_f1,min_f1,max_f1,mean_final_f1,seeds";

fn seed_line(variable: SweepVariable, u: &SeedBest) -> String {
    let b: &MetricRow = &u.outcome.best;
    format!(
        "{variable},{},{},{},{},{},{},{},{},{},{},{},{}",
        u.value,
        u.algorithm,
        u.seed,
        u.instance_seed,
        b.param_string(),
        b.at,
        b.f1,
        b.precision,
        b.recall,
        b.err2,
        b.sparsity,
        u.outcome.final_f1
    )
}

/// Per-seed best rows.
pub fn write_sweep_csv(path: &Path, result: &AggregateResult) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{SWEEP_CSV_HEADER}")?;
    for row in &result.rows {
        for u in &row.per_seed {
            writeln!(f, "{}", seed_line(result.variable, u))?;
        }
    }
    f.flush()?;
    Ok(())
}

pub fn write_aggregate_csv(path: &Path, result: &AggregateResult) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{AGGREGATE_CSV_HEADER}")?;
    for r in &result.rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            result.variable,
            r.value,
            r.algorithm,
            r.mean_f1,
            r.std_f1,
            r.min_f1,
            r.max_f1,
            r.mean_final_f1,
            r.per_seed.len()
        )?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(algorithm: Algorithm, value: f64, seed: u64, f1: f64) -> SeedBest {
        let best = MetricRow {
            algorithm: algorithm.to_string(),
            params: vec![],
            seed,
            at: 1.0,
            f1,
            precision: f1,
            recall: f1,
            err2: 0.0,
            sparsity: 1,
        };
        SeedBest {
            algorithm,
            value,
            seed,
            instance_seed: seed,
            outcome: GridOutcome { best, final_f1: f1, cells_run: 1, cells_skipped: 0 },
            trace: Vec::new(),
        }
    }

    #[test]
    fn aggregate_is_order_independent() {
        let units = vec![
            unit(Algorithm::Irksn, 1.0, 0, 0.5),
            unit(Algorithm::Irksn, 1.0, 1, 1.0),
            unit(Algorithm::Srdi, 1.0, 0, 0.2),
            unit(Algorithm::Irksn, 2.0, 0, 0.25),
        ];
        let order = [Algorithm::Irksn, Algorithm::Srdi];
        let a = aggregate(SweepVariable::N, units.clone(), &[1.0, 2.0], &order);
        let mut rev = units;
        rev.reverse();
        assert_eq!(a, aggregate(SweepVariable::N, rev, &[1.0, 2.0], &order));
        let r = a.row(Algorithm::Irksn, 1.0).unwrap();
        assert_eq!((r.mean_f1, r.std_f1, r.min_f1, r.max_f1), (0.75, 0.25, 0.5, 1.0));
        assert_eq!(a.row(Algorithm::Srdi, 1.0).unwrap().std_f1, 0.0);
        assert_eq!(a.series(Algorithm::Irksn).len(), 2);
    }

    #[test]
    fn single_unit_sweep_has_zero_std() {
        let cfg: ExperimentConfig = r#"
name = "tiny"
seeds = [3]
algorithms = ["iht"]
max_iter = 50
trace_every = 10
[sweep]
variable = "snr"
values = [2.0]
[fixed]
d = 8
k = 2
n = 6
rho = 0.3
"#
        .parse()
        .unwrap();
        let a = run_sweep(&cfg, Some(1)).unwrap();
        assert_eq!(a.rows.len(), 1);
        assert_eq!(a.rows[0].std_f1, 0.0);
        assert_eq!(a.rows[0].per_seed[0].instance_seed, instance_seed(0, 3));
        let trace: Vec<usize> = a.rows[0].per_seed[0].trace.iter().map(|p| p.0).collect();
        assert_eq!(trace, vec![10, 20, 30, 40, 50]);
        assert_eq!(a, run_sweep(&cfg, Some(2)).unwrap());
    }
}
