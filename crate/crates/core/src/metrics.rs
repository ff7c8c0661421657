//! Support-recovery scores, model error and path tables.

use std::fmt::Write as _;

use ndarray::ArrayView1;

use crate::linalg::dist2;
use crate::solvers::{PathPoint, SolverRun};
use crate::{GroundTruth, Scalar};

/// Support tolerance for methods whose iterates are exactly sparse.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;
/// Support tolerance for IROSR, whose iterates never hit zero exactly.
pub const IROSR_SUPPORT_TOL: f64 = 1e-6;

/// Support tolerance used when scoring `algorithm`.
pub fn support_tol_for(algorithm: &str) -> f64 {
    if algorithm == "irosr" {
        IROSR_SUPPORT_TOL
    } else {
        DEFAULT_SUPPORT_TOL
    }
}

/// Indices with `|wᵢ| > tol`, ascending.
pub fn support_of<T: Scalar>(w: ArrayView1<T>, tol: T) -> Vec<usize> {
    w.iter().enumerate().filter(|(_, v)| v.abs() > tol).map(|(i, _)| i).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportScore {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Scores a predicted support against the true one (both ascending).
/// An empty prediction scores zero everywhere.
pub fn score_supports(predicted: &[usize], truth: &[usize]) -> SupportScore {
    let hits = predicted.iter().filter(|i| truth.binary_search(i).is_ok()).count() as f64;
    let precision = if predicted.is_empty() { 0.0 } else { hits / predicted.len() as f64 };
    let recall = if truth.is_empty() { 0.0 } else { hits / truth.len() as f64 };
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    SupportScore { f1, precision, recall }
}

pub fn f1_support<T: Scalar>(w_hat: ArrayView1<T>, truth: &GroundTruth<T>, tol: T) -> SupportScore {
    score_supports(&support_of(w_hat, tol), truth.support())
}

/// `‖ŵ − w*‖`.
pub fn model_error<T: Scalar>(w_hat: ArrayView1<T>, truth: &GroundTruth<T>) -> T {
    dist2(w_hat, truth.w_star())
}

/// One evaluated iterate or path point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub algorithm: String,
    pub params: Vec<(String, f64)>,
    pub seed: u64,
    /// Iteration for iterative methods, `λ` for path methods.
    pub at: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub err2: f64,
    pub sparsity: usize,
}

pub const CSV_HEADER: &str = "algorithm,seed,params,iter,f1,precision,recall,err2,sparsity";

impl MetricRow {
    pub fn evaluate<T: Scalar>(
        algorithm: &str,
        params: &[(String, f64)],
        seed: u64,
        at: f64,
        w: ArrayView1<T>,
        truth: &GroundTruth<T>,
    ) -> Self {
        let tol = T::lit(support_tol_for(algorithm));
        let support = support_of(w, tol);
        let score = score_supports(&support, truth.support());
        Self {
            algorithm: algorithm.to_string(),
            params: params.to_vec(),
            seed,
            at,
            f1: score.f1,
            precision: score.precision,
            recall: score.recall,
            err2: model_error(w, truth).to_f64_lossy(),
            sparsity: support.len(),
        }
    }

    /// `key=value` pairs joined by `;`, values in shortest round-trip form.
    pub fn param_string(&self) -> String {
        format_params(&self.params)
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.seed,
            self.param_string(),
            self.at,
            self.f1,
            self.precision,
            self.recall,
            self.err2,
            self.sparsity
        )
    }
}

pub fn format_params(params: &[(String, f64)]) -> String {
    let mut s = String::new();
    for (i, (k, v)) in params.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        let _ = write!(s, "{k}={v}");
    }
    s
}

/// One row per recorded snapshot.
pub fn extract_path<T: Scalar>(run: &SolverRun<T>, truth: &GroundTruth<T>, seed: u64) -> Vec<MetricRow> {
    run.snapshots.iter().map(|s| MetricRow::evaluate(&run.algorithm, &run.params, seed, s.t as f64, s.w.view(), truth)).collect()
}

/// One row per path point, indexed by `λ`.
pub fn path_rows<T: Scalar>(algorithm: &str, points: &[PathPoint<T>], truth: &GroundTruth<T>, seed: u64) -> Vec<MetricRow> {
    points
        .iter()
        .map(|p| {
            let params = vec![("ratio".to_string(), p.ratio.to_f64_lossy())];
            MetricRow::evaluate(algorithm, &params, seed, p.lambda.to_f64_lossy(), p.w.view(), truth)
        })
        .collect()
}

/// First snapshot index `t` at which coordinate `leaving` is active while
/// `entering` is not, followed within `max_gap` snapshots by the reverse.
pub fn find_exchange<T: Scalar>(run: &SolverRun<T>, leaving: usize, entering: usize, max_gap: usize) -> Option<(usize, usize)> {
    let snaps = &run.snapshots;
    let on = |i: usize, j: usize| snaps[i].w[j] != T::zero();
    (0..snaps.len()).find_map(|i| {
        if !(on(i, leaving) && !on(i, entering)) {
            return None;
        }
        (i + 1..snaps.len().min(i + 1 + max_gap)).find(|&j| !on(j, leaving) && on(j, entering)).map(|j| (snaps[i].t, snaps[j].t))
    })
}
