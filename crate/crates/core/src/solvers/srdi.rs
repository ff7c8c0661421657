//! Sparse recovery via differential inclusions, discretised as linearized
//! Bregman iteration (Osher, Ruan, Xiong, Yao and Yin, 2016):
//!
//! ```text
//! zₜ = zₜ₋₁ − α Xᵀ(X wₜ₋₁ − y^δ)/n
//! wₜ = κ · shrink(zₜ, 1)
//! ```
//!
//! from `z₀ = w₀ = 0`. The damping `κ` and step `α` are the two
//! hyperparameters; the iteration is stable for `κα‖X‖²/n < 2`.

use ndarray::Array1;

use super::{emit, ensure_finite, gradient, param_list, positive, soft_threshold, Observer, Recorder, Schedule, SolverRun};
use crate::{ProblemInstance, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrdiConfig<T> {
    pub kappa: T,
    pub alpha: T,
    pub schedule: Schedule,
}

impl<T: Scalar> SrdiConfig<T> {
    pub fn new(kappa: T, alpha: T, max_iter: usize) -> Self {
        Self { kappa, alpha, schedule: Schedule::new(max_iter, 1) }
    }
}

pub fn srdi_observed<T: Scalar>(
    instance: &ProblemInstance<T>,
    config: &SrdiConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<Array1<T>> {
    positive("kappa", config.kappa)?;
    positive("alpha", config.alpha)?;
    config.schedule.validate()?;
    let scale = config.alpha / T::from_usize_lossy(instance.n());
    let mut z = Array1::zeros(instance.d());
    let mut w = Array1::zeros(instance.d());
    for t in 1..=config.schedule.max_iter {
        let g = gradient(instance, w.view());
        z.scaled_add(-scale, &g);
        w = soft_threshold(z.view(), T::one()).mapv(|v| v * config.kappa);
        ensure_finite("srdi", t, w.view())?;
        emit(observer, instance, t, w.view(), None);
    }
    Ok(w)
}

pub fn srdi<T: Scalar>(instance: &ProblemInstance<T>, config: &SrdiConfig<T>) -> Result<SolverRun<T>> {
    let run = SolverRun::new("srdi", param_list(&[("kappa", config.kappa.to_f64_lossy()), ("alpha", config.alpha.to_f64_lossy())]));
    let mut rec = Recorder::new(run, config.schedule);
    srdi_observed(instance, config, &mut rec)?;
    Ok(rec.finish())
}
