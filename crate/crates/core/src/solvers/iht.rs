//! Iterative hard thresholding (Blumensath and Davies, 2009):
//! `wₜ = H_k(wₜ₋₁ − η Xᵀ(X wₜ₋₁ − y^δ))` from `w₀ = 0`.

use ndarray::Array1;

use super::{emit, ensure_finite, gradient, param_list, positive, Observer, Recorder, Schedule, SolverRun};
use crate::ksupport::{check_k, hard_threshold};
use crate::{ProblemInstance, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IhtConfig<T> {
    pub k: usize,
    pub eta: T,
    pub schedule: Schedule,
}

impl<T: Scalar> IhtConfig<T> {
    pub fn new(k: usize, eta: T, max_iter: usize) -> Self {
        Self { k, eta, schedule: Schedule::new(max_iter, 1) }
    }
}

pub fn iht_observed<T: Scalar>(instance: &ProblemInstance<T>, config: &IhtConfig<T>, observer: &mut dyn Observer<T>) -> Result<Array1<T>> {
    check_k(config.k, instance.d())?;
    positive("eta", config.eta)?;
    config.schedule.validate()?;
    let mut w = Array1::zeros(instance.d());
    for t in 1..=config.schedule.max_iter {
        let g = gradient(instance, w.view());
        let step = &w - &g.mapv(|v| v * config.eta);
        w = hard_threshold(step.view(), config.k)?;
        ensure_finite("iht", t, w.view())?;
        emit(observer, instance, t, w.view(), None);
    }
    Ok(w)
}

pub fn iht<T: Scalar>(instance: &ProblemInstance<T>, config: &IhtConfig<T>) -> Result<SolverRun<T>> {
    let run = SolverRun::new("iht", param_list(&[("k", config.k as f64), ("eta", config.eta.to_f64_lossy())]));
    let mut rec = Recorder::new(run, config.schedule);
    iht_observed(instance, config, &mut rec)?;
    Ok(rec.finish())
}
