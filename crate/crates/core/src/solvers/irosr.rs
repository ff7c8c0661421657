//! Implicit regularization for optimal sparse recovery (Vaškevičius, Kanade
//! and Rebeschini, 2019): gradient descent on the Hadamard
//! reparameterisation `w = u⊙u − v⊙v` from `u₀ = v₀ = α·𝟙`,
//!
//! ```text
//! gₜ = Xᵀ(X wₜ₋₁ − y^δ)/n
//! uₜ = uₜ₋₁ ⊙ (𝟙 − 4η gₜ)
//! vₜ = vₜ₋₁ ⊙ (𝟙 + 4η gₜ)
//! ```
//!
//! Iterates are never exactly sparse; score them with a looser support
//! tolerance (see [`crate::metrics::IROSR_SUPPORT_TOL`]).

use ndarray::Array1;

use super::{emit, ensure_finite, gradient, param_list, positive, Observer, Recorder, Schedule, SolverRun};
use crate::error::param;
use crate::{ProblemInstance, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrosrConfig<T> {
    pub eta: T,
    /// Initialisation scale; `0` is allowed and is a fixed point.
    pub alpha_init: T,
    pub schedule: Schedule,
}

impl<T: Scalar> IrosrConfig<T> {
    pub fn new(eta: T, alpha_init: T, max_iter: usize) -> Self {
        Self { eta, alpha_init, schedule: Schedule::new(max_iter, 1) }
    }
}

pub fn irosr_observed<T: Scalar>(
    instance: &ProblemInstance<T>,
    config: &IrosrConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<Array1<T>> {
    positive("eta", config.eta)?;
    if !(config.alpha_init >= T::zero()) || !config.alpha_init.is_finite() {
        return param(format!("alpha_init must be finite and non-negative, got {}", config.alpha_init));
    }
    config.schedule.validate()?;
    let d = instance.d();
    let scale = T::lit(4.0) * config.eta / T::from_usize_lossy(instance.n());
    let mut u = Array1::from_elem(d, config.alpha_init);
    let mut v = Array1::from_elem(d, config.alpha_init);
    let mut w = Array1::zeros(d);
    for t in 1..=config.schedule.max_iter {
        let g = gradient(instance, w.view());
        for i in 0..d {
            u[i] *= T::one() - scale * g[i];
            v[i] *= T::one() + scale * g[i];
        }
        w = &u * &u - &v * &v;
        ensure_finite("irosr", t, w.view())?;
        emit(observer, instance, t, w.view(), None);
    }
    Ok(w)
}

pub fn irosr<T: Scalar>(instance: &ProblemInstance<T>, config: &IrosrConfig<T>) -> Result<SolverRun<T>> {
    let run = SolverRun::new("irosr", param_list(&[("eta", config.eta.to_f64_lossy()), ("alpha", config.alpha_init.to_f64_lossy())]));
    let mut rec = Recorder::new(run, config.schedule).with_support_tol(T::lit(crate::metrics::IROSR_SUPPORT_TOL));
    irosr_observed(instance, config, &mut rec)?;
    Ok(rec.finish())
}
