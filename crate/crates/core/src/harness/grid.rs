//! Hyperparameter grids and best-cell selection.

use std::fmt;
use std::str::FromStr;

use log::info;
use ndarray::{s, Array1, ArrayView1};

use crate::error::{param, Error};
use crate::linalg::dist2;
use crate::metrics::{support_of, support_tol_for, MetricRow};
use crate::solvers::{
    elasticnet_path, iht_observed, ircr_observed, irksn_observed, irosr_observed, lambda_grid, omp, srdi_observed, IhtConfig, IrcrConfig,
    IrksnConfig, IrosrConfig, Observer, PathConfig, SrdiConfig, Step, ENET_RATIOS,
};
use crate::{GroundTruth, ProblemInstance, Result};

/// Decade values shared by the default grids.
pub const DECADES: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
/// IRKSN `α` values; cells with `α ≥ 1` are rejected by the solver and skipped.
pub const IRKSN_ALPHAS: [f64; 6] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0];
/// Points per regularization path.
pub const PATH_POINTS: usize = 100;
/// Smallest path `λ` relative to `λ_max`.
pub const PATH_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Irksn,
    Iht,
    Srdi,
    Irosr,
    Ircr,
    Lasso,
    ElasticNet,
    Omp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Irksn,
        Algorithm::Iht,
        Algorithm::Srdi,
        Algorithm::Irosr,
        Algorithm::Ircr,
        Algorithm::Lasso,
        Algorithm::ElasticNet,
        Algorithm::Omp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Irksn => "irksn",
            Algorithm::Iht => "iht",
            Algorithm::Srdi => "srdi",
            Algorithm::Irosr => "irosr",
            Algorithm::Ircr => "ircr",
            Algorithm::Lasso => "lasso",
            Algorithm::ElasticNet => "elasticnet",
            Algorithm::Omp => "omp",
        }
    }

    /// Grid axes accepted by the algorithm.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Algorithm::Irksn => &["k", "alpha"],
            Algorithm::Iht => &["k", "eta"],
            Algorithm::Srdi => &["kappa", "alpha"],
            Algorithm::Irosr => &["eta", "alpha"],
            Algorithm::Ircr => &[],
            Algorithm::Lasso => &[],
            Algorithm::ElasticNet => &["ratio"],
            Algorithm::Omp => &["k"],
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Algorithm::Irksn | Algorithm::Iht | Algorithm::Srdi | Algorithm::Irosr | Algorithm::Ircr)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.as_str() == s).ok_or_else(|| Error::Parse(format!("unknown algorithm `{s}`")))
    }
}

/// Cartesian grid over named axes; cells enumerate the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub algorithm: Algorithm,
    pub axes: Vec<(String, Vec<f64>)>,
}

impl Grid {
    pub fn new(algorithm: Algorithm, axes: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let grid = Self { algorithm, axes };
        grid.validate()?;
        Ok(grid)
    }

    /// Default grid with sparsity level `k` where the method takes one.
    pub fn default_for(algorithm: Algorithm, k: usize) -> Self {
        let kk = vec![k as f64];
        let axes: Vec<(&str, Vec<f64>)> = match algorithm {
            Algorithm::Irksn => vec![("k", kk), ("alpha", IRKSN_ALPHAS.to_vec())],
            Algorithm::Iht => vec![("k", kk), ("eta", DECADES.to_vec())],
            Algorithm::Srdi => vec![("kappa", DECADES.to_vec()), ("alpha", DECADES.to_vec())],
            Algorithm::Irosr => vec![("eta", DECADES.to_vec()), ("alpha", DECADES.to_vec())],
            Algorithm::Ircr | Algorithm::Lasso => vec![],
            Algorithm::ElasticNet => vec![("ratio", ENET_RATIOS.to_vec())],
            Algorithm::Omp => vec![("k", kk)],
        };
        Self { algorithm, axes: axes.into_iter().map(|(n, v)| (n.to_string(), v)).collect() }
    }

    /// Replaces the listed axes, keeping the rest.
    pub fn with_axis(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        match self.axes.iter_mut().find(|(n, _)| n == name) {
            Some(axis) => axis.1 = values,
            None => self.axes.push((name.to_string(), values)),
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.algorithm.param_names();
        for (name, values) in &self.axes {
            if !allowed.contains(&name.as_str()) {
                return param(format!("{} has no parameter `{name}` (expected one of {allowed:?})", self.algorithm));
            }
            if values.is_empty() {
                return param(format!("grid axis `{}.{name}` is empty", self.algorithm));
            }
        }
        for name in allowed {
            if !self.axes.iter().any(|(n, _)| n == name) {
                return param(format!("grid for {} is missing `{name}`", self.algorithm));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cells(&self) -> Vec<Vec<(String, f64)>> {
        let mut cells = vec![Vec::new()];
        for (name, values) in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push((name.clone(), v));
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

/// How a cell's representative iterate and the best cell are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Selection {
    /// Best support F1 against the truth, over all iterates.
    #[default]
    OracleF1,
    /// Lowest validation MSE; the last `fraction` of the rows is held out.
    HoldoutMse { fraction: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub max_iter: usize,
    pub seed: u64,
    pub selection: Selection,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { max_iter: 20_000, seed: 0, selection: Selection::OracleF1 }
    }
}

/// Result of a grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub best: MetricRow,
    /// F1 of the last iterate of the winning cell.
    pub final_f1: f64,
    pub cells_run: usize,
    pub cells_skipped: usize,
}

/// Ranking key, smaller is better.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, f64);

impl Key {
    fn better_than(self, other: Key) -> bool {
        self.0 < other.0 || (self.0 == other.0 && self.1 < other.1)
    }
}

struct Validation {
    x: ndarray::Array2<f64>,
    y: Array1<f64>,
}

struct Scorer<'a> {
    algorithm: &'static str,
    truth: &'a GroundTruth<f64>,
    tol: f64,
    validation: Option<&'a Validation>,
}

impl Scorer<'_> {
    fn row(&self, params: &[(String, f64)], seed: u64, at: f64, w: ArrayView1<f64>) -> MetricRow {
        MetricRow::evaluate(self.algorithm, params, seed, at, w, self.truth)
    }

    fn key(&self, w: ArrayView1<f64>) -> Key {
        match self.validation {
            Some(v) => {
                let r = v.x.dot(&w) - &v.y;
                Key(r.dot(&r) / v.y.len() as f64, 0.0)
            }
            None => {
                let score = crate::metrics::score_supports(&support_of(w, self.tol), self.truth.support());
                Key(-score.f1, dist2(w, self.truth.w_star()))
            }
        }
    }
}

/// Streams a cell's iterates, keeping the best one and the last one.
struct CellTracker<'a> {
    scorer: &'a Scorer<'a>,
    best: Option<(Key, usize, Array1<f64>)>,
    last: Option<(usize, Array1<f64>)>,
}

impl Observer<f64> for CellTracker<'_> {
    fn wants(&self, _: usize) -> bool {
        true
    }

    fn observe(&mut self, step: &Step<'_, f64>) {
        let key = self.scorer.key(step.w);
        if self.best.as_ref().is_none_or(|(b, _, _)| key.better_than(*b)) {
            self.best = Some((key, step.t, step.w.to_owned()));
        }
        match &mut self.last {
            Some((t, w)) => {
                *t = step.t;
                w.assign(&step.w);
            }
            None => self.last = Some((step.t, step.w.to_owned())),
        }
    }
}

fn get(params: &[(String, f64)], name: &str) -> Result<f64> {
    params.iter().find(|(n, _)| n == name).map(|(_, v)| *v).ok_or_else(|| Error::Parameter(format!("missing parameter `{name}`")))
}

fn get_k(params: &[(String, f64)]) -> Result<usize> {
    let k = get(params, "k")?;
    if k < 1.0 || k.fract() != 0.0 {
        return param(format!("k must be a positive integer, got {k}"));
    }
    Ok(k as usize)
}

fn run_iterative(
    algorithm: Algorithm,
    instance: &ProblemInstance<f64>,
    params: &[(String, f64)],
    max_iter: usize,
    observer: &mut dyn Observer<f64>,
) -> Result<()> {
    match algorithm {
        Algorithm::Irksn => {
            irksn_observed(instance, &IrksnConfig::new(get_k(params)?, get(params, "alpha")?, max_iter), observer).map(drop)
        }
        Algorithm::Iht => iht_observed(instance, &IhtConfig::new(get_k(params)?, get(params, "eta")?, max_iter), observer).map(drop),
        Algorithm::Srdi => {
            srdi_observed(instance, &SrdiConfig::new(get(params, "kappa")?, get(params, "alpha")?, max_iter), observer).map(drop)
        }
        Algorithm::Irosr => {
            irosr_observed(instance, &IrosrConfig::new(get(params, "eta")?, get(params, "alpha")?, max_iter), observer).map(drop)
        }
        Algorithm::Ircr => ircr_observed(instance, &IrcrConfig::new(max_iter), observer).map(drop),
        _ => unreachable!("{algorithm} is not iterative"),
    }
}

/// `(params, at, w)` of one non-iterative candidate.
type Candidate = (Vec<(String, f64)>, f64, Array1<f64>);

fn run_direct(algorithm: Algorithm, instance: &ProblemInstance<f64>, params: &[(String, f64)]) -> Result<Vec<Candidate>> {
    match algorithm {
        Algorithm::Omp => Ok(vec![(params.to_vec(), 0.0, omp(instance, get_k(params)?)?)]),
        Algorithm::Lasso | Algorithm::ElasticNet => {
            let ratio = if algorithm == Algorithm::Lasso { 1.0 } else { get(params, "ratio")? };
            let lambdas = lambda_grid(instance, ratio, PATH_POINTS, PATH_EPS)?;
            let points = elasticnet_path(instance, &lambdas, ratio, &PathConfig::default())?;
            Ok(points
                .into_iter()
                .map(|p| {
                    let mut cell = params.to_vec();
                    cell.push(("lambda".to_string(), p.lambda));
                    (cell, p.lambda, p.w)
                })
                .collect())
        }
        _ => unreachable!("{algorithm} is iterative"),
    }
}

struct F1Trace<'a> {
    scorer: &'a Scorer<'a>,
    every: usize,
    points: Vec<(usize, f64)>,
}

impl Observer<f64> for F1Trace<'_> {
    fn wants(&self, t: usize) -> bool {
        t.is_multiple_of(self.every)
    }

    fn observe(&mut self, step: &Step<'_, f64>) {
        let f1 = crate::metrics::score_supports(&support_of(step.w, self.scorer.tol), self.scorer.truth.support()).f1;
        self.points.push((step.t, f1));
    }
}

/// Support F1 of an iterative method's iterates at every multiple of `every`.
pub fn f1_trace(
    instance: &ProblemInstance<f64>,
    truth: &GroundTruth<f64>,
    algorithm: Algorithm,
    params: &[(String, f64)],
    max_iter: usize,
    every: usize,
) -> Result<Vec<(usize, f64)>> {
    if !algorithm.is_iterative() {
        return param(format!("{algorithm} has no iterates to trace"));
    }
    if every == 0 {
        return param("trace interval must be at least 1");
    }
    let scorer = Scorer { algorithm: algorithm.as_str(), truth, tol: support_tol_for(algorithm.as_str()), validation: None };
    let mut trace = F1Trace { scorer: &scorer, every, points: Vec::new() };
    run_iterative(algorithm, instance, params, max_iter, &mut trace)?;
    Ok(trace.points)
}

fn split_holdout(instance: &ProblemInstance<f64>, fraction: f64) -> Result<(ProblemInstance<f64>, Validation)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return param(format!("holdout fraction must lie in (0, 1), got {fraction}"));
    }
    let n = instance.n();
    let held = ((n as f64) * fraction).ceil() as usize;
    if held == 0 || held >= n {
        return param(format!("holdout of {held} rows out of {n} leaves nothing to fit or validate"));
    }
    let cut = n - held;
    let x = instance.x();
    let y = instance.y();
    let train = ProblemInstance::new(x.slice(s![..cut, ..]).to_owned(), y.slice(s![..cut]).to_owned(), instance.delta())?;
    let validation = Validation { x: x.slice(s![cut.., ..]).to_owned(), y: y.slice(s![cut..]).to_owned() };
    Ok((train, validation))
}

/// Runs every cell of `grid` and returns the best row.
///
/// Iterative methods are scored at every iterate. Ties go to the lower
/// model error, then to the earlier iterate and grid cell. Cells that fail
/// (divergence or rejected parameters) are logged and skipped.
pub fn run_grid(instance: &ProblemInstance<f64>, truth: &GroundTruth<f64>, grid: &Grid, options: &GridOptions) -> Result<GridOutcome> {
    grid.validate()?;
    if grid.is_empty() {
        return param(format!("grid for {} is empty", grid.algorithm));
    }
    let algorithm = grid.algorithm;
    let (fit_on, validation) = match options.selection {
        Selection::OracleF1 => (None, None),
        Selection::HoldoutMse { fraction } => {
            let (train, v) = split_holdout(instance, fraction)?;
            (Some(train), Some(v))
        }
    };
    let fit_on = fit_on.as_ref().unwrap_or(instance);
    let scorer = Scorer { algorithm: algorithm.as_str(), truth, tol: support_tol_for(algorithm.as_str()), validation: validation.as_ref() };

    let mut best: Option<(Key, MetricRow, f64)> = None;
    let mut offer = |key: Key, row: MetricRow, final_f1: f64| {
        if best.as_ref().is_none_or(|(b, _, _)| key.better_than(*b)) {
            best = Some((key, row, final_f1));
        }
    };
    let (mut run, mut skipped) = (0, 0);
    for cell in grid.cells() {
        if algorithm.is_iterative() {
            let mut tracker = CellTracker { scorer: &scorer, best: None, last: None };
            match run_iterative(algorithm, fit_on, &cell, options.max_iter, &mut tracker) {
                Ok(()) => {
                    run += 1;
                    if let (Some((key, t, w)), Some((tl, wl))) = (tracker.best, tracker.last) {
                        let final_f1 = scorer.row(&cell, options.seed, tl as f64, wl.view()).f1;
                        offer(key, scorer.row(&cell, options.seed, t as f64, w.view()), final_f1);
                    }
                }
                Err(e) => {
                    skipped += 1;
                    info!("{algorithm} cell {} skipped: {e}", crate::metrics::format_params(&cell));
                }
            }
        } else {
            match run_direct(algorithm, fit_on, &cell) {
                Ok(points) => {
                    run += 1;
                    for (params, at, w) in points {
                        let row = scorer.row(&params, options.seed, at, w.view());
                        let f1 = row.f1;
                        offer(scorer.key(w.view()), row, f1);
                    }
                }
                Err(e) => {
                    skipped += 1;
                    info!("{algorithm} cell {} skipped: {e}", crate::metrics::format_params(&cell));
                }
            }
        }
    }
    let (_, best, final_f1) = best.ok_or_else(|| Error::Parameter(format!("every {algorithm} grid cell failed")))?;
    Ok(GridOutcome { best, final_f1, cells_run: run, cells_skipped: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn identity() -> (ProblemInstance<f64>, GroundTruth<f64>) {
        let x = Array2::<f64>::eye(4);
        let t = GroundTruth::from_design(x.view(), array![0.0, 2.0, 0.0, -1.0]).unwrap();
        (ProblemInstance::new(x, t.y_clean().to_owned(), 0.0).unwrap(), t)
    }

    #[test]
    fn default_grids() {
        let g = Grid::default_for(Algorithm::Irksn, 10);
        assert_eq!(g.len(), 6);
        assert_eq!(g.cells()[5], vec![("k".to_string(), 10.0), ("alpha".to_string(), 10.0)]);
        assert_eq!(Grid::default_for(Algorithm::Srdi, 10).len(), 25);
        assert_eq!(Grid::default_for(Algorithm::Irosr, 10).len(), 25);
        assert_eq!(Grid::default_for(Algorithm::Iht, 10).len(), 5);
        assert_eq!(Grid::default_for(Algorithm::Ircr, 10).len(), 1);
        for a in Algorithm::ALL {
            Grid::default_for(a, 3).validate().unwrap();
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
    }

    #[test]
    fn cells_enumerate_last_axis_fastest() {
        let g = Grid::new(Algorithm::Srdi, vec![("kappa".into(), vec![1.0, 2.0]), ("alpha".into(), vec![3.0, 4.0])]).unwrap();
        let firsts: Vec<_> = g.cells().iter().map(|c| (c[0].1, c[1].1)).collect();
        assert_eq!(firsts, vec![(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]);
    }

    #[test]
    fn unknown_axis_is_named() {
        let err =
            Grid::new(Algorithm::Iht, vec![("k".into(), vec![1.0]), ("eta".into(), vec![1.0]), ("beta".into(), vec![1.0])]).unwrap_err();
        assert!(err.to_string().contains("`beta`"), "{err}");
        assert!(Grid::new(Algorithm::Iht, vec![("k".into(), vec![1.0])]).is_err());
    }

    #[test]
    fn single_cell_grid_returns_its_best_row() {
        let (inst, t) = identity();
        let g = Grid::new(Algorithm::Iht, vec![("k".into(), vec![2.0]), ("eta".into(), vec![1.0])]).unwrap();
        let out = run_grid(&inst, &t, &g, &GridOptions { max_iter: 5, ..Default::default() }).unwrap();
        assert_eq!((out.best.f1, out.best.at, out.final_f1), (1.0, 1.0, 1.0));
        assert_eq!((out.cells_run, out.cells_skipped), (1, 0));
    }

    #[test]
    fn diverging_cells_are_skipped() {
        let (inst, t) = identity();
        let g = Grid::new(Algorithm::Iht, vec![("k".into(), vec![2.0]), ("eta".into(), vec![0.5, 1e6])]).unwrap();
        let out = run_grid(&inst, &t, &g, &GridOptions { max_iter: 200, ..Default::default() }).unwrap();
        assert_eq!((out.cells_run, out.cells_skipped), (1, 1));
        assert!(out.best.err2.is_finite());
        let all_bad = Grid::new(Algorithm::Iht, vec![("k".into(), vec![2.0]), ("eta".into(), vec![1e6])]).unwrap();
        assert!(run_grid(&inst, &t, &all_bad, &GridOptions { max_iter: 200, ..Default::default() }).is_err());
    }

    #[test]
    fn irksn_alpha_at_least_one_is_skipped() {
        let (inst, t) = identity();
        let out =
            run_grid(&inst, &t, &Grid::default_for(Algorithm::Irksn, 2), &GridOptions { max_iter: 50, ..Default::default() }).unwrap();
        assert_eq!((out.cells_run, out.cells_skipped), (4, 2));
        assert_eq!(out.best.f1, 1.0);
    }

    #[test]
    fn traces_follow_the_interval() {
        let (inst, t) = identity();
        let params = vec![("k".to_string(), 2.0), ("eta".to_string(), 1.0)];
        let tr = f1_trace(&inst, &t, Algorithm::Iht, &params, 10, 5).unwrap();
        assert_eq!(tr, vec![(5, 1.0), (10, 1.0)]);
        assert!(f1_trace(&inst, &t, Algorithm::Lasso, &[], 10, 5).is_err());
    }

    #[test]
    fn path_methods_score_every_point() {
        let (inst, t) = identity();
        let out = run_grid(&inst, &t, &Grid::default_for(Algorithm::Lasso, 2), &GridOptions::default()).unwrap();
        assert_eq!(out.best.f1, 1.0);
        assert!(out.best.params.iter().any(|(n, _)| n == "lambda"));
    }

    #[test]
    fn holdout_selection_runs() {
        let x = Array2::from_shape_fn((12, 4), |(i, j)| if i % 4 == j { 1.0 } else { 0.1 * ((i + j) % 3) as f64 });
        let t = GroundTruth::from_design(x.view(), array![0.0, 2.0, 0.0, -1.0]).unwrap();
        let inst = ProblemInstance::new(x, t.y_clean().to_owned(), 0.0).unwrap();
        let opts = GridOptions { max_iter: 300, selection: Selection::HoldoutMse { fraction: 0.25 }, ..Default::default() };
        let out = run_grid(&inst, &t, &Grid::default_for(Algorithm::Iht, 2), &opts).unwrap();
        assert!(out.best.f1 > 0.0);
        let bad = GridOptions { selection: Selection::HoldoutMse { fraction: 1.0 }, ..opts };
        assert!(run_grid(&inst, &t, &Grid::default_for(Algorithm::Iht, 2), &bad).is_err());
    }
}
