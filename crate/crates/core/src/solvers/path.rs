//! Lasso and ElasticNet regularization paths.
//!
//! For a mixing ratio `r ∈ (0, 1]` each point solves
//! `min ½‖Xw − y^δ‖² + λ(r‖w‖₁ + ((1−r)/2)‖w‖²)` by accelerated proximal
//! gradient (FISTA with adaptive restart) at step `1/‖X‖²`, warm-started
//! from the previous point. The prox of the penalty at step `s` is
//! `shrink(z, sλr)/(1 + sλ(1−r))`.

use ndarray::Array1;

use super::gradient;
use crate::error::param;
use crate::linalg::{norm_inf, spectral_norm};
use crate::{ProblemInstance, Result, Scalar};

/// Mixing ratios searched for ElasticNet.
pub const ENET_RATIOS: [f64; 7] = [0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    /// Stop when `‖wₜ − wₜ₋₁‖∞ ≤ tol · max(1, ‖wₜ‖∞)`.
    pub tol: f64,
    pub max_inner: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_inner: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint<T> {
    pub lambda: T,
    pub ratio: T,
    pub w: Array1<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// `count` geometrically spaced values from `λ_max = ‖Xᵀy^δ‖∞/r` down to
/// `λ_max · eps`. Every point at or above `λ_max` has the zero solution.
pub fn lambda_grid<T: Scalar>(instance: &ProblemInstance<T>, ratio: T, count: usize, eps: T) -> Result<Vec<T>> {
    check_ratio(ratio)?;
    if count == 0 || !(eps > T::zero() && eps <= T::one()) {
        return param("lambda grid needs count ≥ 1 and eps in (0, 1]");
    }
    let lmax = norm_inf(instance.x().t().dot(&instance.y()).view()) / ratio;
    if count == 1 {
        return Ok(vec![lmax]);
    }
    let step = eps.ln() / T::from_usize_lossy(count - 1);
    Ok((0..count).map(|i| lmax * (step * T::from_usize_lossy(i)).exp()).collect())
}

fn check_ratio<T: Scalar>(ratio: T) -> Result<()> {
    if !(ratio > T::zero() && ratio <= T::one()) {
        return param(format!("l1 ratio must lie in (0, 1], got {ratio}"));
    }
    Ok(())
}

/// ElasticNet path at a single mixing ratio.
pub fn elasticnet_path<T: Scalar>(
    instance: &ProblemInstance<T>,
    lambdas: &[T],
    ratio: T,
    config: &PathConfig,
) -> Result<Vec<PathPoint<T>>> {
    check_ratio(ratio)?;
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= T::zero()) || !l.is_finite()) {
        return param(format!("lambda values must be finite and non-negative, got {bad}"));
    }
    let nx = spectral_norm(instance.x());
    if nx == T::zero() {
        return Ok(lambdas
            .iter()
            .map(|&lambda| PathPoint { lambda, ratio, w: Array1::zeros(instance.d()), iterations: 0, converged: true })
            .collect());
    }
    let step = T::one() / (nx * nx);
    let tol = T::lit(config.tol);

    let mut w = Array1::<T>::zeros(instance.d());
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let thresh = step * lambda * ratio;
        let shrink = T::one() + step * lambda * (T::one() - ratio);
        let prox = |z: Array1<T>| z.mapv(|v| v.signum() * (v.abs() - thresh).max(T::zero()) / shrink);

        let mut momentum_point = w.clone();
        let mut theta = T::one();
        let mut converged = false;
        let mut iterations = 0;
        while iterations < config.max_inner {
            iterations += 1;
            let g = gradient(instance, momentum_point.view());
            let w_next = prox(&momentum_point - &g.mapv(|v| v * step));
            let delta = &w_next - &w;
            let change = norm_inf(delta.view());
            // restart when the step opposes the momentum direction
            let restart = (&momentum_point - &w_next).dot(&delta) > T::zero();
            let theta_next = (T::one() + (T::one() + T::lit(4.0) * theta * theta).sqrt()) / T::lit(2.0);
            if restart {
                theta = T::one();
                momentum_point = w_next.clone();
            } else {
                let beta = (theta - T::one()) / theta_next;
                momentum_point = &w_next + &delta.mapv(|v| v * beta);
                theta = theta_next;
            }
            w = w_next;
            if change <= tol * norm_inf(w.view()).max(T::one()) {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!("path point lambda={lambda} ratio={ratio} stopped at {iterations} iterations without converging");
        }
        out.push(PathPoint { lambda, ratio, w: w.clone(), iterations, converged });
    }
    Ok(out)
}

/// Lasso path: [`elasticnet_path`] at ratio 1.
pub fn lasso_path<T: Scalar>(instance: &ProblemInstance<T>, lambdas: &[T], config: &PathConfig) -> Result<Vec<PathPoint<T>>> {
    elasticnet_path(instance, lambdas, T::one(), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn inst() -> ProblemInstance<f64> {
        let x = array![[1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.0, 0.4, 1.0], [0.5, 0.0, 0.2], [0.3, 0.3, 0.3]];
        let y = array![1.0, -2.0, 0.5, 0.7, 0.1];
        ProblemInstance::new(x, y, 0.0).unwrap()
    }

    #[test]
    fn above_lambda_max_is_zero() {
        let inst = inst();
        let grid = lambda_grid(&inst, 1.0, 5, 1e-3).unwrap();
        let path = lasso_path(&inst, &[grid[0], grid[0] * 2.0], &PathConfig::default()).unwrap();
        assert!(path.iter().all(|p| p.w.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn tiny_lambda_gives_least_squares() {
        let inst = inst();
        let path = lasso_path(&inst, &[1e-12], &PathConfig::default()).unwrap();
        let ls = crate::linalg::lstsq_min_norm(inst.x(), inst.y());
        assert!(crate::linalg::dist2(path[0].w.view(), ls.view()) < 1e-6);
        assert!(path[0].converged);
        let enet = elasticnet_path(&inst, &[0.0], 0.5, &PathConfig::default()).unwrap();
        assert!(crate::linalg::dist2(enet[0].w.view(), ls.view()) < 1e-6);
    }

    #[test]
    fn grid_shape() {
        let inst = inst();
        let grid = lambda_grid(&inst, 0.5, 100, 1e-3).unwrap();
        assert_eq!(grid.len(), 100);
        let lmax = norm_inf(inst.x().t().dot(&inst.y()).view()) / 0.5;
        assert!((grid[0] - lmax).abs() < 1e-12 && (grid[99] - lmax * 1e-3).abs() < 1e-12);
        assert!(grid.windows(2).all(|p| p[1] < p[0]));
        assert!(lambda_grid(&inst, 0.0, 10, 1e-3).is_err());
    }

    #[test]
    fn ratio_one_matches_lasso() {
        let inst = inst();
        let grid = lambda_grid(&inst, 1.0, 20, 1e-3).unwrap();
        let a = lasso_path(&inst, &grid, &PathConfig::default()).unwrap();
        let b = elasticnet_path(&inst, &grid, 1.0, &PathConfig::default()).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!(crate::linalg::dist2(p.w.view(), q.w.view()) <= 1e-8);
        }
    }
}
