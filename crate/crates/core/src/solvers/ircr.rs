//! Iterative regularization for convex regularizers (Molinari, Massias,
//! Rosasco and Villa, 2021) with the ℓ1 norm: primal-dual iteration on
//! `min ‖w‖₁ s.t. Xw = y^δ`,
//!
//! ```text
//! wₜ = shrink(wₜ₋₁ − τ Xᵀ(2vₜ₋₁ − vₜ₋₂), τ)
//! vₜ = vₜ₋₁ + σ (X wₜ − y^δ)
//! ```
//!
//! from zero, with `τ = σ = 0.9/√(2‖X‖²)` by default.

use ndarray::Array1;

use super::{emit, ensure_finite, param_list, positive, soft_threshold, Observer, Recorder, Schedule, SolverRun};
use crate::error::param;
use crate::linalg::MatrixNorm;
use crate::{ProblemInstance, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrcrConfig<T> {
    /// `(τ, σ)`; `None` selects `0.9/√(2‖X‖²)` for both.
    pub steps: Option<(T, T)>,
    pub norm: MatrixNorm,
    pub schedule: Schedule,
}

impl<T: Scalar> IrcrConfig<T> {
    pub fn new(max_iter: usize) -> Self {
        Self { steps: None, norm: MatrixNorm::Spectral, schedule: Schedule::new(max_iter, 1) }
    }

    /// `(τ, σ)` for `instance`.
    pub fn resolve_steps(&self, instance: &ProblemInstance<T>) -> Result<(T, T)> {
        match self.steps {
            Some((tau, sigma)) => {
                positive("tau", tau)?;
                positive("sigma", sigma)?;
                Ok((tau, sigma))
            }
            None => {
                let nx = self.norm.of(instance.x());
                if nx == T::zero() {
                    return param("design matrix is zero; default steps undefined");
                }
                let s = T::lit(0.9) / (T::lit(2.0) * nx * nx).sqrt();
                Ok((s, s))
            }
        }
    }
}

pub fn ircr_observed<T: Scalar>(
    instance: &ProblemInstance<T>,
    config: &IrcrConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<Array1<T>> {
    config.schedule.validate()?;
    let (tau, sigma) = config.resolve_steps(instance)?;
    let x = instance.x();
    let mut w = Array1::zeros(instance.d());
    let mut v = Array1::<T>::zeros(instance.n());
    let mut v_prev = Array1::<T>::zeros(instance.n());
    for t in 1..=config.schedule.max_iter {
        let v_bar = v.mapv(|a| a * T::lit(2.0)) - &v_prev;
        let arg = &w - &x.t().dot(&v_bar).mapv(|a| a * tau);
        w = soft_threshold(arg.view(), tau);
        let v_next = &v + &instance.residual(w.view()).mapv(|a| a * sigma);
        v_prev = std::mem::replace(&mut v, v_next);
        ensure_finite("ircr", t, w.view())?;
        emit(observer, instance, t, w.view(), None);
    }
    Ok(w)
}

pub fn ircr<T: Scalar>(instance: &ProblemInstance<T>, config: &IrcrConfig<T>) -> Result<SolverRun<T>> {
    let (tau, sigma) = config.resolve_steps(instance)?;
    let run = SolverRun::new("ircr", param_list(&[("tau", tau.to_f64_lossy()), ("sigma", sigma.to_f64_lossy())]));
    let mut rec = Recorder::new(run, config.schedule);
    ircr_observed(instance, config, &mut rec)?;
    Ok(rec.finish())
}
