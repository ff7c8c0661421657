//! IRKSN and the baseline solvers.
//!
//! Iterative methods report every iterate to an [`Observer`]. The plain
//! entry points ([`irksn()`], [`iht()`], ...) attach a [`Recorder`] and
//! return a [`SolverRun`]; the `*_observed` variants take any observer so
//! that grid searches can score iterates on the fly without storing them.
//!
//! Loss convention throughout: `½‖Xw − y^δ‖²`.

mod iht;
mod ircr;
mod irksn;
mod irosr;
mod ksn;
mod omp;
mod path;
mod srdi;

pub use iht::{iht, iht_observed, IhtConfig};
pub use ircr::{ircr, ircr_observed, IrcrConfig};
pub use irksn::{irksn, irksn_observed, Irksn, IrksnConfig, IrksnState};
pub use irosr::{irosr, irosr_observed, IrosrConfig};
pub use ksn::{ksn_objective, ksn_penalized, ksn_penalized_observed, KsnConfig};
pub use omp::omp;
pub use path::{elasticnet_path, lambda_grid, lasso_path, PathConfig, PathPoint, ENET_RATIOS};
pub use srdi::{srdi, srdi_observed, SrdiConfig};

use ndarray::{Array1, ArrayView1};

use crate::error::{param, Error};
use crate::linalg::{all_finite, norm2};
use crate::{ProblemInstance, Result, Scalar};

/// Iteration budget and recording stride shared by the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub max_iter: usize,
    pub record_every: usize,
}

impl Schedule {
    pub fn new(max_iter: usize, record_every: usize) -> Self {
        Self { max_iter, record_every }
    }

    pub fn validate(&self) -> Result<()> {
        if self.record_every == 0 {
            return param("record_every must be at least 1");
        }
        Ok(())
    }

    /// Whether iteration `t` (1-based) is recorded.
    pub fn records(&self, t: usize) -> bool {
        t.is_multiple_of(self.record_every)
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self { max_iter: 20_000, record_every: 1 }
    }
}

/// One iterate handed to an observer.
pub struct Step<'a, T> {
    /// 1-based iteration counter.
    pub t: usize,
    pub w: ArrayView1<'a, T>,
    /// Momentum parameter, for accelerated methods.
    pub momentum: Option<T>,
    pub instance: &'a ProblemInstance<T>,
}

impl<T: Scalar> Step<'_, T> {
    pub fn residual_norm(&self) -> T {
        norm2(self.instance.residual(self.w).view())
    }
}

/// Receives iterates from a running solver.
pub trait Observer<T> {
    /// Whether iteration `t` should be delivered at all.
    fn wants(&self, t: usize) -> bool;
    fn observe(&mut self, step: &Step<'_, T>);
}

/// Observer that discards everything.
pub struct Discard;

impl<T> Observer<T> for Discard {
    fn wants(&self, _: usize) -> bool {
        false
    }
    fn observe(&mut self, _: &Step<'_, T>) {}
}

/// Stored iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: usize,
    pub w: Array1<T>,
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub t: usize,
    /// Number of entries with `|wᵢ| > support_tol`.
    pub sparsity: usize,
    pub residual_norm: T,
    pub momentum: Option<T>,
    /// `‖w − w*‖` when the recorder was given the truth.
    pub model_error: Option<T>,
}

/// Iterates of one solver run plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverRun<T> {
    pub algorithm: String,
    pub params: Vec<(String, f64)>,
    pub snapshots: Vec<Snapshot<T>>,
    pub trace: Vec<TraceRow<T>>,
}

impl<T: Scalar> SolverRun<T> {
    pub fn new(algorithm: impl Into<String>, params: Vec<(String, f64)>) -> Self {
        Self { algorithm: algorithm.into(), params, snapshots: Vec::new(), trace: Vec::new() }
    }

    pub fn last(&self) -> Option<&Snapshot<T>> {
        self.snapshots.last()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// Observer that builds a [`SolverRun`].
pub struct Recorder<T> {
    schedule: Schedule,
    support_tol: T,
    truth: Option<Array1<T>>,
    run: SolverRun<T>,
}

impl<T: Scalar> Recorder<T> {
    pub fn new(run: SolverRun<T>, schedule: Schedule) -> Self {
        Self { schedule, support_tol: T::lit(crate::metrics::DEFAULT_SUPPORT_TOL), truth: None, run }
    }

    pub fn with_truth(mut self, w_star: ArrayView1<T>) -> Self {
        self.truth = Some(w_star.to_owned());
        self
    }

    pub fn with_support_tol(mut self, tol: T) -> Self {
        self.support_tol = tol;
        self
    }

    pub fn finish(self) -> SolverRun<T> {
        self.run
    }
}

impl<T: Scalar> Observer<T> for Recorder<T> {
    fn wants(&self, t: usize) -> bool {
        self.schedule.records(t)
    }

    fn observe(&mut self, step: &Step<'_, T>) {
        let sparsity = step.w.iter().filter(|v| v.abs() > self.support_tol).count();
        let model_error = self.truth.as_ref().map(|ws| crate::linalg::dist2(step.w, ws.view()));
        self.run.trace.push(TraceRow { t: step.t, sparsity, residual_norm: step.residual_norm(), momentum: step.momentum, model_error });
        self.run.snapshots.push(Snapshot { t: step.t, w: step.w.to_owned() });
    }
}

/// Fans each step out to two observers.
pub struct Both<'a, T>(pub &'a mut dyn Observer<T>, pub &'a mut dyn Observer<T>);

impl<T> Observer<T> for Both<'_, T> {
    fn wants(&self, t: usize) -> bool {
        self.0.wants(t) || self.1.wants(t)
    }
    fn observe(&mut self, step: &Step<'_, T>) {
        if self.0.wants(step.t) {
            self.0.observe(step);
        }
        if self.1.wants(step.t) {
            self.1.observe(step);
        }
    }
}

/// Delivers iterate `t` if the observer asks for it.
pub(crate) fn emit<T: Scalar>(
    observer: &mut dyn Observer<T>,
    instance: &ProblemInstance<T>,
    t: usize,
    w: ArrayView1<T>,
    momentum: Option<T>,
) {
    if observer.wants(t) {
        observer.observe(&Step { t, w, momentum, instance });
    }
}

pub(crate) fn ensure_finite<T: Scalar>(solver: &'static str, iteration: usize, v: ArrayView1<T>) -> Result<()> {
    if all_finite(v) {
        Ok(())
    } else {
        Err(Error::Divergence { solver, iteration })
    }
}

pub(crate) fn positive<T: Scalar>(name: &str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        param(format!("{name} must be positive and finite, got {value}"))
    }
}

/// Componentwise `sign(z)·max(|z| − τ, 0)`.
pub fn soft_threshold<T: Scalar>(z: ArrayView1<T>, tau: T) -> Array1<T> {
    z.mapv(|v| v.signum() * (v.abs() - tau).max(T::zero()))
}

/// `Xᵀ(Xw − y^δ)`, the gradient of the loss.
pub(crate) fn gradient<T: Scalar>(instance: &ProblemInstance<T>, w: ArrayView1<T>) -> Array1<T> {
    instance.x().t().dot(&instance.residual(w))
}

pub(crate) fn param_list(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn soft_threshold_values() {
        let z = array![3.0, -0.5, -2.0, 1.0];
        assert_eq!(soft_threshold(z.view(), 1.0), array![2.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn schedule_strides() {
        let s = Schedule::new(10, 5);
        assert!(!s.records(1));
        assert!(s.records(5));
        assert!(s.records(10));
        assert!(Schedule::new(10, 0).validate().is_err());
    }
}
