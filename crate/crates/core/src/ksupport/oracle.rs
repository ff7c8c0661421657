//! Independent reference computations for the k-support norm and its prox.
//!
//! These avoid the sorted closed form and the breakpoint search. Instead
//! they solve the variational characterisation
//! `(‖w‖ₖˢᵖ)² = min { Σᵢ wᵢ²/θᵢ : θ ∈ [0,1]ᵈ, Σθ ≤ k }` directly, by
//! bisection on the multiplier of the budget constraint. The prox objective
//! reduces the same way:
//! `min_x (λ/2)(‖x‖ₖˢᵖ)² + ½‖x−w‖² = min_θ ½ Σᵢ λ wᵢ²/(θᵢ+λ)`.
//!
//! [`self_test`] runs a randomised battery over both and is what the
//! `prox-selftest` command drives.

use ndarray::{Array1, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_k, ksup_norm, prox_half_squared_ksup, topk_norm, KSupProxParams};
use crate::linalg::{dist2, norm2};
use crate::{Result, Scalar};

const BISECTION_STEPS: usize = 200;

/// Bisection for the scalar `s` at which `Σᵢ g(s, i) = k`, where each term
/// is non-decreasing in `s`, starting from the bracket `[0, hi]`.
fn bisect_budget(mut hi: f64, k: f64, total: impl Fn(f64) -> f64) -> f64 {
    while total(hi) < k {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if total(mid) < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Optimal weights `θ` of the variational form of the k-support norm.
///
/// Stationarity gives `θᵢ = min(1, s|wᵢ|)` with `s` fixed by `Σθ = k`
/// (or every nonzero weight at 1 when there are at most `k` nonzeros).
pub fn variational_weights(w: ArrayView1<f64>, k: usize) -> Result<Array1<f64>> {
    check_k(k, w.len())?;
    let mags = w.mapv(f64::abs);
    let nnz = mags.iter().filter(|m| **m > 0.0).count();
    if nnz <= k {
        return Ok(mags.mapv(|m| if m > 0.0 { 1.0 } else { 0.0 }));
    }
    let max = mags.iter().copied().fold(0.0, f64::max);
    let s = bisect_budget(1.0 / max, k as f64, |s| mags.iter().map(|m| (s * m).min(1.0)).sum());
    Ok(mags.mapv(|m| (s * m).min(1.0)))
}

/// k-support norm through its variational definition.
pub fn ksup_norm_variational(w: ArrayView1<f64>, k: usize) -> Result<f64> {
    let theta = variational_weights(w, k)?;
    let sq: f64 = w.iter().zip(theta.iter()).filter(|(_, t)| **t > 0.0).map(|(wi, ti)| wi * wi / ti).sum();
    Ok(sq.sqrt())
}

/// A maximiser of `⟨u, w⟩` over the unit ball of the top-k norm.
///
/// Built from the optimal weights as `u = (w/θ)/‖w‖ₖˢᵖ`. Checking
/// `topk_norm(u) = 1` and `⟨u, w⟩ = ‖w‖ₖˢᵖ` certifies the dual-norm identity
/// from one side; weak duality `⟨u', w⟩ ≤ ‖w‖ₖˢᵖ · topk_norm(u')` covers the
/// other.
pub fn dual_certificate(w: ArrayView1<f64>, k: usize) -> Result<Array1<f64>> {
    let theta = variational_weights(w, k)?;
    let value = ksup_norm_variational(w, k)?;
    if value == 0.0 {
        return Ok(Array1::zeros(w.len()));
    }
    Ok(Array1::from_iter(w.iter().zip(theta.iter()).map(|(wi, ti)| if *ti > 0.0 { wi / ti / value } else { 0.0 })))
}

/// `(λ/2)(‖x‖ₖˢᵖ)² + ½‖x − w‖²`, the objective the prox minimises.
pub fn prox_objective<T: Scalar>(w: ArrayView1<T>, x: ArrayView1<T>, k: usize, lambda: T) -> Result<T> {
    let n = ksup_norm(x, k)?;
    let r = dist2(x, w);
    Ok(lambda / T::lit(2.0) * n * n + r * r / T::lit(2.0))
}

/// Exact minimum of the prox objective, computed over the weights `θ`.
///
/// For fixed `θ` the inner minimiser is `xᵢ = θᵢwᵢ/(θᵢ+λ)`; the outer
/// problem is convex and separable up to the budget, so
/// `θᵢ = clip(|wᵢ|·s − λ, 0, 1)` with `s` found by bisection.
pub fn prox_objective_minimum(w: ArrayView1<f64>, k: usize, lambda: f64) -> Result<f64> {
    check_k(k, w.len())?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mags = w.mapv(f64::abs);
    let nnz = mags.iter().filter(|m| **m > 0.0).count();
    let theta = if nnz <= k {
        mags.mapv(|m| if m > 0.0 { 1.0 } else { 0.0 })
    } else {
        let max = mags.iter().copied().fold(0.0, f64::max);
        let weight = |s: f64, m: f64| (s * m - lambda).clamp(0.0, 1.0);
        let s = bisect_budget((1.0 + lambda) / max, k as f64, |s| mags.iter().map(|m| weight(s, *m)).sum());
        mags.mapv(|m| weight(s, m))
    };
    Ok(0.5 * lambda * mags.iter().zip(theta.iter()).map(|(m, t)| m * m / (t + lambda)).sum::<f64>())
}

/// Fenchel–Young gap `f(x) + f*(w−x) − ⟨x, w−x⟩` for
/// `f = (λ/2)(‖·‖ₖˢᵖ)²`, whose conjugate is `(1/(2λ))‖·‖₍ₖ₎²`.
///
/// Non-negative, and zero exactly when `w − x ∈ ∂f(x)`, i.e. when
/// `x = prox_f(w)` and `w − x = prox_{f*}(w)` (Moreau decomposition).
pub fn fenchel_young_gap(w: ArrayView1<f64>, x: ArrayView1<f64>, k: usize, lambda: f64) -> Result<f64> {
    let u = &w - &x;
    let ks = ksup_norm(x, k)?;
    let tk = topk_norm(u.view(), k)?;
    Ok(0.5 * lambda * ks * ks + tk * tk / (2.0 * lambda) - x.dot(&u))
}

/// Settings of the randomised prox/norm battery.
#[derive(Debug, Clone, Copy)]
pub struct SelfTestConfig {
    pub trials: usize,
    pub dim_max: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        Self { trials: 200, dim_max: 12, seed: 0, tol: 1e-8 }
    }
}

/// Outcome of [`self_test`]. `failures` lists one message per failed check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelfTestSummary {
    pub checks: usize,
    pub failures: Vec<String>,
    pub max_objective_gap: f64,
    pub max_fenchel_young_gap: f64,
    pub max_theta_sum_error: f64,
    pub max_nonexpansive_excess: f64,
    pub max_norm_mismatch: f64,
}

impl SelfTestSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Array1<f64> {
    // occasional exact zeros exercise the no-breakpoint path
    Array1::from_iter((0..d).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random_range(-5.0..5.0) }))
}

/// Randomised battery: for each trial draw `d ≤ dim_max`, `k ≤ d`,
/// `λ = 10^U(−2,1)` and vectors `w, w'`, then check
///
/// * the prox objective against [`prox_objective_minimum`],
/// * the Fenchel–Young gap of the prox output,
/// * `Σθ = k` whenever `w` has at least `k` nonzeros,
/// * non-expansiveness on `(w, w')`,
/// * the closed-form norm against the variational one and its certificate.
///
/// Objective and norm comparisons are relative to `max(1, value)`.
pub fn self_test(config: &SelfTestConfig) -> Result<SelfTestSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = SelfTestSummary::default();
    let tol = config.tol;
    let dim_max = config.dim_max.max(1);

    for trial in 0..config.trials {
        let d = rng.random_range(1..=dim_max);
        let k = rng.random_range(1..=d);
        let lambda = 10f64.powf(rng.random_range(-2.0..1.0));
        let w = random_vector(&mut rng, d);
        let w2 = random_vector(&mut rng, d);
        let params = KSupProxParams::new(k, lambda);
        let (x, profile) = prox_half_squared_ksup(w.view(), &params)?;
        let (x2, _) = prox_half_squared_ksup(w2.view(), &params)?;
        let mut fail = |what: &str, value: f64| {
            out.failures.push(format!("trial {trial} (d={d}, k={k}, lambda={lambda:.3e}): {what} = {value:.3e}"));
        };

        let reference = prox_objective_minimum(w.view(), k, lambda)?;
        let obj_gap = (prox_objective(w.view(), x.view(), k, lambda)? - reference).abs() / reference.max(1.0);
        out.max_objective_gap = out.max_objective_gap.max(obj_gap);
        if !(obj_gap <= tol) {
            fail("objective gap", obj_gap);
        }

        let fy = fenchel_young_gap(w.view(), x.view(), k, lambda)?;
        let fy_rel = fy.abs() / (norm2(w.view()).powi(2)).max(1.0);
        out.max_fenchel_young_gap = out.max_fenchel_young_gap.max(fy_rel);
        if !(fy_rel <= tol) {
            fail("Fenchel-Young gap", fy_rel);
        }

        let nnz = w.iter().filter(|v| **v != 0.0).count();
        if nnz >= k {
            let err = (profile.theta_sum() - k as f64).abs();
            out.max_theta_sum_error = out.max_theta_sum_error.max(err);
            if !(err <= 1e-9) {
                fail("theta-sum error", err);
            }
        }

        let excess = dist2(x.view(), x2.view()) - dist2(w.view(), w2.view());
        out.max_nonexpansive_excess = out.max_nonexpansive_excess.max(excess);
        if !(excess <= 1e-9) {
            fail("non-expansiveness excess", excess);
        }

        let closed = ksup_norm(w.view(), k)?;
        let variational = ksup_norm_variational(w.view(), k)?;
        let cert = dual_certificate(w.view(), k)?;
        let cert_value = cert.dot(&w);
        let cert_norm = if closed > 0.0 { topk_norm(cert.view(), k)? } else { 1.0 };
        let mismatch =
            [(closed - variational).abs(), (closed - cert_value).abs(), (cert_norm - 1.0).abs() * closed].into_iter().fold(0.0, f64::max)
                / closed.max(1.0);
        out.max_norm_mismatch = out.max_norm_mismatch.max(mismatch);
        if !(mismatch <= tol) {
            fail("norm mismatch", mismatch);
        }

        out.checks += 5;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn variational_matches_closed_form_on_fixed_vector() {
        let w = array![3.0, 1.0, 0.5];
        assert_abs_diff_eq!(ksup_norm_variational(w.view(), 2).unwrap(), 11.25f64.sqrt(), epsilon = 1e-12);
        let u = dual_certificate(w.view(), 2).unwrap();
        assert_abs_diff_eq!(topk_norm(u.view(), 2).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.dot(&w), 11.25f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn prox_minimum_fixed_vector() {
        // θ = (1, 5/6, 1/6): ¼·(9/1.5 + 1/(4/3) + 0.25/(2/3)) = 1.78125
        assert_abs_diff_eq!(prox_objective_minimum(array![3.0, 1.0, 0.5].view(), 2, 0.5).unwrap(), 1.78125, epsilon = 1e-12);
        let (x, _) = prox_half_squared_ksup(array![3.0, 1.0, 0.5].view(), &KSupProxParams::new(2, 0.5)).unwrap();
        assert_abs_diff_eq!(prox_objective(array![3.0, 1.0, 0.5].view(), x.view(), 2, 0.5).unwrap(), 1.78125, epsilon = 1e-12);
    }

    #[test]
    fn fenchel_young_vanishes_only_at_prox() {
        let w = array![3.0, -1.0, 0.5, 2.0];
        let (x, _) = prox_half_squared_ksup(w.view(), &KSupProxParams::new(2, 0.8)).unwrap();
        assert!(fenchel_young_gap(w.view(), x.view(), 2, 0.8).unwrap().abs() < 1e-12);
        let off = &x + &array![0.01, 0.0, 0.0, 0.0];
        assert!(fenchel_young_gap(w.view(), off.view(), 2, 0.8).unwrap() > 1e-6);
    }

    #[test]
    fn battery_passes_and_is_deterministic() {
        let cfg = SelfTestConfig { trials: 50, ..Default::default() };
        let a = self_test(&cfg).unwrap();
        assert!(a.passed(), "{:?}", a.failures);
        assert_eq!(a.checks, 250);
        assert_eq!(a, self_test(&cfg).unwrap());
    }

    #[test]
    fn battery_with_no_trials_is_empty() {
        let s = self_test(&SelfTestConfig { trials: 0, ..Default::default() }).unwrap();
        assert_eq!(s.checks, 0);
        assert!(s.passed());
    }
}
