//! Penalized k-support regression (Argyriou, Foygel and Srebro, 2012):
//! proximal gradient on `½‖Xw − y^δ‖² + (λ/2)(‖w‖ₖˢᵖ)²` with step `1/L`,
//!
//! ```text
//! wₜ = prox_{(λ/L)/2 (‖·‖ₖˢᵖ)²}(wₜ₋₁ − Xᵀ(X wₜ₋₁ − y^δ)/L)
//! ```
//!
//! Descent is monotone whenever `L ≥ ‖X‖²`.

use ndarray::{Array1, ArrayView1};

use super::{emit, ensure_finite, gradient, param_list, positive, Observer, Recorder, Schedule, SolverRun};
use crate::error::param;
use crate::ksupport::{check_k, ksup_norm, prox_half_squared_ksup, KSupProxParams};
use crate::{ProblemInstance, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsnConfig<T> {
    pub k: usize,
    pub lambda: T,
    pub lipschitz: T,
    pub schedule: Schedule,
}

impl<T: Scalar> KsnConfig<T> {
    pub fn new(k: usize, lambda: T, lipschitz: T, max_iter: usize) -> Self {
        Self { k, lambda, lipschitz, schedule: Schedule::new(max_iter, 1) }
    }
}

/// `½‖Xw − y^δ‖² + (λ/2)(‖w‖ₖˢᵖ)²`.
pub fn ksn_objective<T: Scalar>(instance: &ProblemInstance<T>, w: ArrayView1<T>, k: usize, lambda: T) -> Result<T> {
    let n = ksup_norm(w, k)?;
    Ok(instance.loss(w) + lambda / T::lit(2.0) * n * n)
}

pub fn ksn_penalized_observed<T: Scalar>(
    instance: &ProblemInstance<T>,
    config: &KsnConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<Array1<T>> {
    check_k(config.k, instance.d())?;
    positive("L", config.lipschitz)?;
    if !(config.lambda >= T::zero()) || !config.lambda.is_finite() {
        return param(format!("lambda must be finite and non-negative, got {}", config.lambda));
    }
    config.schedule.validate()?;
    let step = T::one() / config.lipschitz;
    let prox = KSupProxParams::new(config.k, config.lambda * step);
    let mut w = Array1::zeros(instance.d());
    for t in 1..=config.schedule.max_iter {
        let g = gradient(instance, w.view());
        let arg = &w - &g.mapv(|v| v * step);
        w = prox_half_squared_ksup(arg.view(), &prox)?.0;
        ensure_finite("ksn", t, w.view())?;
        emit(observer, instance, t, w.view(), None);
    }
    Ok(w)
}

pub fn ksn_penalized<T: Scalar>(instance: &ProblemInstance<T>, config: &KsnConfig<T>) -> Result<SolverRun<T>> {
    let run = SolverRun::new(
        "ksn",
        param_list(&[("k", config.k as f64), ("lambda", config.lambda.to_f64_lossy()), ("L", config.lipschitz.to_f64_lossy())]),
    );
    let mut rec = Recorder::new(run, config.schedule);
    ksn_penalized_observed(instance, config, &mut rec)?;
    Ok(rec.finish())
}
