//! Iterative regularization with the k-support norm.
//!
//! Accelerated dual gradient descent on the dual of
//! `min R(w) s.t. Xw = y^δ` with `R = ((1−α)/2)(‖·‖ₖˢᵖ)² + (α/2)‖·‖²`.
//! Starting from `v̂₁ = ẑ₀ = 0 ∈ ℝⁿ` and `θ₀ = 1`, iteration `t = 1, 2, …`
//! computes
//!
//! ```text
//! r̂ₜ   = prox_{α⁻¹F}(−α⁻¹ Xᵀ v̂ₜ)
//! ẑₜ   = v̂ₜ + γ (X r̂ₜ − y^δ)
//! ŵₜ   = prox_{α⁻¹F}(−α⁻¹ Xᵀ ẑₜ)
//! θₜ   = (1 + √(1 + 4θₜ₋₁²)) / 2
//! v̂ₜ₊₁ = ẑₜ + ((θₜ₋₁ − 1)/θₜ) (ẑₜ − ẑₜ₋₁)
//! ```
//!
//! with `γ = α/‖X‖²` unless overridden. The primal iterate `ŵₜ` is read off
//! the freshly updated dual variable `ẑₜ`.

use ndarray::{Array1, ArrayView1};

use super::{emit, ensure_finite, param_list, positive, Observer, Recorder, Schedule, SolverRun};
use crate::error::param;
use crate::ksupport::{check_k, irksn_prox_scale, prox_half_squared_ksup, KSupProxParams};
use crate::linalg::MatrixNorm;
use crate::{ProblemInstance, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrksnConfig<T> {
    pub k: usize,
    pub alpha: T,
    /// Dual step; `None` means `α/‖X‖²` with `‖X‖` from `norm`.
    pub gamma: Option<T>,
    pub norm: MatrixNorm,
    pub schedule: Schedule,
}

impl<T: Scalar> IrksnConfig<T> {
    pub fn new(k: usize, alpha: T, max_iter: usize) -> Self {
        Self { k, alpha, gamma: None, norm: MatrixNorm::Spectral, schedule: Schedule::new(max_iter, 1) }
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.schedule.record_every = every;
        self
    }

    pub fn gamma(mut self, gamma: T) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn norm(mut self, norm: MatrixNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        check_k(self.k, d)?;
        irksn_prox_scale(self.alpha)?;
        if let Some(g) = self.gamma {
            positive("gamma", g)?;
        }
        if self.schedule.max_iter < 2 {
            return param(format!("max_iter must be at least 2, got {}", self.schedule.max_iter));
        }
        self.schedule.validate()
    }
}

/// Iterates of the accelerated loop after `t` completed iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct IrksnState<T> {
    pub w_hat: Array1<T>,
    pub v_hat: Array1<T>,
    pub z_hat: Array1<T>,
    pub z_prev: Array1<T>,
    /// `θₜ`; equals `θ₀ = 1` before the first iteration.
    pub theta: T,
    pub t: usize,
}

/// A configured IRKSN instance, stepping an [`IrksnState`].
pub struct Irksn<'a, T> {
    instance: &'a ProblemInstance<T>,
    prox: KSupProxParams<T>,
    alpha: T,
    gamma: T,
}

impl<'a, T: Scalar> Irksn<'a, T> {
    pub fn new(instance: &'a ProblemInstance<T>, config: &IrksnConfig<T>) -> Result<Self> {
        config.validate(instance.d())?;
        let gamma = match config.gamma {
            Some(g) => g,
            None => {
                let nx = config.norm.of(instance.x());
                if nx == T::zero() {
                    return param("design matrix is zero; default step undefined");
                }
                config.alpha / (nx * nx)
            }
        };
        let lambda = irksn_prox_scale(config.alpha)?;
        Ok(Self { instance, prox: KSupProxParams::new(config.k, lambda), alpha: config.alpha, gamma })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn start(&self) -> IrksnState<T> {
        let (n, d) = (self.instance.n(), self.instance.d());
        IrksnState {
            w_hat: Array1::zeros(d),
            v_hat: Array1::zeros(n),
            z_hat: Array1::zeros(n),
            z_prev: Array1::zeros(n),
            theta: T::one(),
            t: 0,
        }
    }

    /// `prox_{α⁻¹F}(−α⁻¹Xᵀ u)`.
    pub fn primal(&self, u: ArrayView1<T>) -> Result<Array1<T>> {
        let arg = self.instance.x().t().dot(&u).mapv(|v| -v / self.alpha);
        prox_half_squared_ksup(arg.view(), &self.prox).map(|(x, _)| x)
    }

    /// One iteration of the accelerated loop.
    pub fn advance(&self, s: &mut IrksnState<T>) -> Result<()> {
        let t = s.t + 1;
        let r = self.primal(s.v_hat.view())?;
        let residual = self.instance.residual(r.view());
        let z = &s.v_hat + &residual.mapv(|v| v * self.gamma);
        ensure_finite("irksn", t, z.view())?;
        let w = self.primal(z.view())?;
        ensure_finite("irksn", t, w.view())?;

        let theta_next = (T::one() + (T::one() + T::lit(4.0) * s.theta * s.theta).sqrt()) / T::lit(2.0);
        let beta = (s.theta - T::one()) / theta_next;
        let v_next = &z + &(&z - &s.z_hat).mapv(|v| v * beta);

        s.z_prev = std::mem::replace(&mut s.z_hat, z);
        s.v_hat = v_next;
        s.w_hat = w;
        s.theta = theta_next;
        s.t = t;
        Ok(())
    }
}

/// Runs IRKSN, feeding each iterate to `observer`; returns the final state.
pub fn irksn_observed<T: Scalar>(
    instance: &ProblemInstance<T>,
    config: &IrksnConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<IrksnState<T>> {
    let solver = Irksn::new(instance, config)?;
    let mut state = solver.start();
    for _ in 0..config.schedule.max_iter {
        solver.advance(&mut state)?;
        emit(observer, instance, state.t, state.w_hat.view(), Some(state.theta));
    }
    Ok(state)
}

pub fn irksn<T: Scalar>(instance: &ProblemInstance<T>, config: &IrksnConfig<T>) -> Result<SolverRun<T>> {
    let run = SolverRun::new("irksn", param_list(&[("k", config.k as f64), ("alpha", config.alpha.to_f64_lossy())]));
    let mut rec = Recorder::new(run, config.schedule);
    irksn_observed(instance, config, &mut rec)?;
    Ok(rec.finish())
}
