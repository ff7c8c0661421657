//! The k-support norm family.
//!
//! * [`topk_norm`]: ℓ2 norm of the `k` largest-magnitude entries, the dual
//!   norm of the k-support norm.
//! * [`hard_threshold`]: keep the `k` largest magnitudes, zero the rest.
//! * [`ksup_norm`]: the k-support norm, evaluated with the sorted closed form
//!   of Argyriou, Foygel and Srebro (2012).
//! * [`prox_half_squared_ksup`]: proximal map of `(λ/2)(‖·‖ₖˢᵖ)²` by the
//!   breakpoint search of McDonald, Pontil and Stamos (2016) instantiated at
//!   `(a, b, c) = (0, 1, k)`.
//!
//! Ties between equal magnitudes are always broken in favour of the lowest
//! index, so every routine here is deterministic.

pub mod oracle;

use ndarray::{Array1, ArrayView1};

use crate::error::{param, Result};
use crate::Scalar;

/// Sparsity level and scale of the proximal operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSupProxParams<T> {
    pub k: usize,
    pub lambda: T,
}

impl<T: Scalar> KSupProxParams<T> {
    pub fn new(k: usize, lambda: T) -> Self {
        Self { k, lambda }
    }

    /// Checks `1 ≤ k ≤ dim` and `λ ≥ 0` (finite).
    pub fn validate(&self, dim: usize) -> Result<()> {
        check_k(self.k, dim)?;
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return param(format!("prox scale must be finite and non-negative, got {}", self.lambda));
        }
        Ok(())
    }
}

/// Diagnostics from one prox evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdProfile<T> {
    /// Sorted breakpoints `{λ/|wⱼ|, (1+λ)/|wⱼ|}` over the nonzero entries.
    pub breakpoints: Vec<T>,
    /// Root of `S(α) = k`; `None` when no root search was needed
    /// (`w = 0`, `λ = 0`, or fewer than `k` nonzeros).
    pub alpha_star: Option<T>,
    /// Per-coordinate weights in `[0, 1]`.
    pub theta: Array1<T>,
}

impl<T: Scalar> ThresholdProfile<T> {
    pub fn theta_sum(&self) -> T {
        self.theta.sum()
    }
}

pub(crate) fn check_k(k: usize, dim: usize) -> Result<()> {
    if k == 0 || k > dim {
        return param(format!("sparsity level k={k} outside 1..={dim}"));
    }
    Ok(())
}

fn by_magnitude_desc<T: Scalar>(v: ArrayView1<T>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    // stable: equal magnitudes keep ascending index order
    idx.sort_by(|&i, &j| v[j].abs().total_order(v[i].abs()));
    idx
}

fn sorted_magnitudes_desc<T: Scalar>(v: ArrayView1<T>) -> Vec<T> {
    let mut mags: Vec<T> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.total_order(*a));
    mags
}

/// ℓ2 norm of the `k` largest-magnitude entries of `w`.
pub fn topk_norm<T: Scalar>(w: ArrayView1<T>, k: usize) -> Result<T> {
    check_k(k, w.len())?;
    let mags = sorted_magnitudes_desc(w);
    let top = Array1::from_iter(mags.into_iter().take(k));
    Ok(crate::linalg::norm2(top.view()))
}

/// Indices of the `k` largest magnitudes (lowest index wins ties), in
/// descending magnitude order.
pub fn top_k_indices<T: Scalar>(z: ArrayView1<T>, k: usize) -> Result<Vec<usize>> {
    check_k(k, z.len())?;
    let mut idx = by_magnitude_desc(z);
    idx.truncate(k);
    Ok(idx)
}

/// One canonical element of the hard-thresholding set: `z` with all but its
/// `k` largest-magnitude entries set to zero.
pub fn hard_threshold<T: Scalar>(z: ArrayView1<T>, k: usize) -> Result<Array1<T>> {
    let keep = top_k_indices(z, k)?;
    let mut out = Array1::zeros(z.len());
    for i in keep {
        out[i] = z[i];
    }
    Ok(out)
}

/// The k-support norm `‖w‖ₖˢᵖ`.
///
/// With `z = |w|` sorted non-increasingly and `z₀ = +∞`, let `r ∈ {0,…,k−1}`
/// be the index with `z_{k−r−1} > (1/(r+1)) Σ_{i≥k−r} zᵢ ≥ z_{k−r}`
/// (1-based). Then
/// `(‖w‖ₖˢᵖ)² = Σ_{i<k−r} zᵢ² + (1/(r+1)) (Σ_{i≥k−r} zᵢ)²`.
pub fn ksup_norm<T: Scalar>(w: ArrayView1<T>, k: usize) -> Result<T> {
    check_k(k, w.len())?;
    let z = sorted_magnitudes_desc(w);
    let d = z.len();
    let scale = z[0];
    if scale == T::zero() {
        return Ok(T::zero());
    }
    // work in units of the largest entry to keep squares in range
    let z: Vec<T> = z.into_iter().map(|x| x / scale).collect();

    // suffix[i] = Σ_{j ≥ i} z[j]
    let mut suffix = vec![T::zero(); d + 1];
    for i in (0..d).rev() {
        suffix[i] = suffix[i + 1] + z[i];
    }
    let mut head_sq = vec![T::zero(); d + 1];
    for i in 0..d {
        head_sq[i + 1] = head_sq[i] + z[i] * z[i];
    }

    let value = |r: usize| {
        let split = k - r - 1; // 0-based index of the first pooled entry
        let tail = suffix[split];
        head_sq[split] + tail * tail / T::from_usize_lossy(r + 1)
    };

    let mut best: Option<(T, usize)> = None;
    for r in 0..k {
        let split = k - r - 1;
        let avg = suffix[split] / T::from_usize_lossy(r + 1);
        let upper = if split == 0 { T::infinity() } else { z[split - 1] };
        let lower = z[split];
        if upper >= avg && avg >= lower {
            return Ok(scale * value(r).sqrt());
        }
        // rounding can leave no index exactly feasible; keep the least violated
        let violation = (avg - upper).max(T::zero()) + (lower - avg).max(T::zero());
        if best.is_none_or(|(v, _)| violation < v) {
            best = Some((violation, r));
        }
    }
    let (_, r) = best.expect("k ≥ 1");
    Ok(scale * value(r).sqrt())
}

fn capped_weight<T: Scalar>(alpha: T, mag: T, lambda: T) -> T {
    (alpha * mag - lambda).max(T::zero()).min(T::one())
}

fn weight_sum<T: Scalar>(alpha: T, mags: &[T], lambda: T) -> T {
    mags.iter().fold(T::zero(), |acc, &m| acc + capped_weight(alpha, m, lambda))
}

/// Proximal operator of `(λ/2)(‖·‖ₖˢᵖ)²`.
///
/// With `S(α) = Σᵢ min(1, max(0, α|wᵢ| − λ))`, the `2d` breakpoints
/// `λ/|wⱼ|` and `(1+λ)/|wⱼ|` are sorted and binary-searched for a pair
/// bracketing `S(α) = k`; `S` is linear between consecutive breakpoints, so
/// `α*` follows by interpolation. The result is
/// `xᵢ = θᵢ wᵢ / (θᵢ + λ)` with `θᵢ = min(1, max(0, α*|wᵢ| − λ))`.
///
/// If `S` is flat at `k` over an interval, `α*` is its midpoint. Zero
/// entries contribute no breakpoints and get `θ = 0`. With fewer than `k`
/// nonzeros the norm is the ℓ2 norm on the support, giving `w/(1+λ)`.
pub fn prox_half_squared_ksup<T: Scalar>(w: ArrayView1<T>, params: &KSupProxParams<T>) -> Result<(Array1<T>, ThresholdProfile<T>)> {
    params.validate(w.len())?;
    let d = w.len();
    let lambda = params.lambda;
    let k = params.k;

    let nonzero: Vec<T> = w.iter().filter(|x| **x != T::zero()).map(|x| x.abs()).collect();
    if nonzero.is_empty() {
        let profile = ThresholdProfile { breakpoints: Vec::new(), alpha_star: None, theta: Array1::zeros(d) };
        return Ok((Array1::zeros(d), profile));
    }
    let support_theta = || w.mapv(|x| if x != T::zero() { T::one() } else { T::zero() });
    if lambda == T::zero() {
        let profile = ThresholdProfile { breakpoints: Vec::new(), alpha_star: None, theta: support_theta() };
        return Ok((w.to_owned(), profile));
    }
    if nonzero.len() < k {
        let profile = ThresholdProfile { breakpoints: Vec::new(), alpha_star: None, theta: support_theta() };
        return Ok((w.mapv(|x| x / (T::one() + lambda)), profile));
    }

    let mut breakpoints: Vec<T> = Vec::with_capacity(2 * nonzero.len());
    for &m in &nonzero {
        breakpoints.push(lambda / m);
        breakpoints.push((T::one() + lambda) / m);
    }
    breakpoints.sort_by(|a, b| a.total_order(*b));

    let target = T::from_usize_lossy(k);
    let tol = T::lit(64.0) * T::epsilon() * T::from_usize_lossy(nonzero.len().max(1));
    let s_at = |i: usize| weight_sum(breakpoints[i], &nonzero, lambda);

    // first breakpoint with S ≥ k (within tolerance); S(last) = nnz ≥ k
    let nb = breakpoints.len();
    let (mut lo, mut hi) = (0usize, nb - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if s_at(mid) >= target - tol {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let j = lo;
    let s_j = s_at(j);

    let alpha_star = if s_j <= target + tol {
        // S(α_j) = k: find where the plateau at k ends
        let (mut lo, mut hi) = (j, nb - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if s_at(mid) <= target + tol {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        (breakpoints[j] + breakpoints[lo]) / T::lit(2.0)
    } else {
        // j ≥ 1 because S vanishes at the smallest breakpoint
        let (a0, a1) = (breakpoints[j - 1], breakpoints[j]);
        let s0 = s_at(j - 1);
        a0 + (target - s0) * (a1 - a0) / (s_j - s0)
    };

    let theta = w.mapv(|x| if x == T::zero() { T::zero() } else { capped_weight(alpha_star, x.abs(), lambda) });
    let x = Array1::from_iter(w.iter().zip(theta.iter()).map(|(&wi, &ti)| ti * wi / (ti + lambda)));
    Ok((x, ThresholdProfile { breakpoints, alpha_star: Some(alpha_star), theta }))
}

/// `λ` such that `α⁻¹F = λ · ½(‖·‖ₖˢᵖ)²` for `F = ((1−α)/2)(‖·‖ₖˢᵖ)²`.
pub fn irksn_prox_scale<T: Scalar>(alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return param(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok((T::one() - alpha) / alpha)
}

/// `prox_{α⁻¹F}(u)` with `F = ((1−α)/2)(‖·‖ₖˢᵖ)²`, the primal step of IRKSN.
pub fn prox_irksn_regularizer<T: Scalar>(u: ArrayView1<T>, k: usize, alpha: T) -> Result<Array1<T>> {
    let lambda = irksn_prox_scale(alpha)?;
    prox_half_squared_ksup(u, &KSupProxParams::new(k, lambda)).map(|(x, _)| x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn topk_examples() {
        let w = array![3.0, -1.0, 2.0];
        assert_abs_diff_eq!(topk_norm(w.view(), 2).unwrap(), 13f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(topk_norm(w.view(), 1).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(topk_norm(w.view(), 3).unwrap(), 14f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn k_out_of_range_is_rejected() {
        let w = array![1.0, 2.0];
        assert!(matches!(topk_norm(w.view(), 0), Err(crate::Error::Parameter(_))));
        assert!(matches!(topk_norm(w.view(), 3), Err(crate::Error::Parameter(_))));
        assert!(hard_threshold(w.view(), 3).is_err());
        assert!(ksup_norm(w.view(), 0).is_err());
        assert!(prox_half_squared_ksup(w.view(), &KSupProxParams::new(3, 1.0)).is_err());
        assert!(prox_half_squared_ksup(w.view(), &KSupProxParams::new(1, -1.0)).is_err());
    }

    #[test]
    fn hard_threshold_examples() {
        assert_eq!(hard_threshold(array![2.0, 1.0].view(), 1).unwrap(), array![2.0, 0.0]);
        // tie: lowest index is kept
        assert_eq!(hard_threshold(array![2.0, 2.0].view(), 1).unwrap(), array![2.0, 0.0]);
        assert_eq!(hard_threshold(array![-2.0, 2.0].view(), 1).unwrap(), array![-2.0, 0.0]);
        assert_eq!(hard_threshold(array![1.0, 2.0, 3.0].view(), 3).unwrap(), array![1.0, 2.0, 3.0]);
    }

    #[test]
    fn ksup_examples() {
        assert_abs_diff_eq!(ksup_norm(array![1.0, -2.0].view(), 1).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ksup_norm(array![1.0, -2.0].view(), 2).unwrap(), 5f64.sqrt(), epsilon = 1e-15);
        // r = 0 branch: 3 > 1 + 0.5 ≥ 1, so ‖w‖² = 9 + 1.5² = 11.25
        // (frozen also against the dual certificate in `oracle`)
        assert_abs_diff_eq!(ksup_norm(array![3.0, 1.0, 0.5].view(), 2).unwrap(), 11.25f64.sqrt(), epsilon = 1e-14);
        assert_eq!(ksup_norm(array![0.0, 0.0].view(), 1).unwrap(), 0.0);
    }

    #[test]
    fn ksup_pooling_branch() {
        // (1, 1, 1), k = 2: everything pooled, 3²/2
        assert_abs_diff_eq!(ksup_norm(array![1.0, 1.0, 1.0].view(), 2).unwrap(), 4.5f64.sqrt(), epsilon = 1e-14);
        // (2, 1, 1), k = 2: boundary case 2 ≥ 2 ≥ 1 at r = 0, value 4 + 2² = 8
        assert_abs_diff_eq!(ksup_norm(array![2.0, 1.0, 1.0].view(), 2).unwrap(), 8f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn prox_lambda_zero_is_identity() {
        let w = array![3.0, -1.0, 0.5, 0.0];
        let (x, _) = prox_half_squared_ksup(w.view(), &KSupProxParams::new(2, 0.0)).unwrap();
        assert_eq!(x, w);
    }

    #[test]
    fn prox_full_k_is_ridge_shrinkage() {
        let (x, _) = prox_half_squared_ksup(array![2.0, 4.0].view(), &KSupProxParams::new(2, 1.0)).unwrap();
        assert_abs_diff_eq!(x, array![1.0, 2.0], epsilon = 1e-14);
    }

    #[test]
    fn prox_of_zero_is_zero() {
        let (x, p) = prox_half_squared_ksup(Array1::<f64>::zeros(4).view(), &KSupProxParams::new(2, 0.7)).unwrap();
        assert_eq!(x, Array1::zeros(4));
        assert_eq!(p.theta, Array1::zeros(4));
        assert!(p.alpha_star.is_none());
    }

    #[test]
    fn prox_k1_is_soft_threshold_at_lambda_l1() {
        // prox of (λ/2)‖·‖₁² soft-thresholds at λ‖x‖₁
        let w: Array1<f64> = array![3.0, -1.0, 0.5];
        let lambda = 0.5;
        let (x, profile) = prox_half_squared_ksup(w.view(), &KSupProxParams::new(1, lambda)).unwrap();
        let tau = lambda * crate::linalg::norm1(x.view());
        for (xi, wi) in x.iter().zip(w.iter()) {
            let soft = wi.signum() * (wi.abs() - tau).max(0.0);
            assert_abs_diff_eq!(*xi, soft, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(profile.theta_sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn prox_fewer_nonzeros_than_k() {
        let w = array![0.0, 3.0, 0.0, -1.0];
        let (x, profile) = prox_half_squared_ksup(w.view(), &KSupProxParams::new(3, 1.0)).unwrap();
        assert_abs_diff_eq!(x, w.mapv(|v| v / 2.0), epsilon = 1e-15);
        assert_eq!(profile.theta, array![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn prox_exactly_k_nonzeros_uses_plateau() {
        let w = array![0.0, 3.0, 0.0, -1.0];
        let (x, profile) = prox_half_squared_ksup(w.view(), &KSupProxParams::new(2, 1.0)).unwrap();
        assert_abs_diff_eq!(x, w.mapv(|v| v / 2.0), epsilon = 1e-14);
        assert!(profile.alpha_star.is_some());
        assert_abs_diff_eq!(profile.theta_sum(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn prox_frozen_value() {
        // S(α) = 1.5α on [1, 1.5] gives α* = 4/3, θ = (1, 5/6, 1/6);
        // matches `oracle::prox_objective_minimum` (value 1.78125)
        let (x, profile) = prox_half_squared_ksup(array![3.0, 1.0, 0.5].view(), &KSupProxParams::new(2, 0.5)).unwrap();
        assert_abs_diff_eq!(x, array![2.0, 0.625, 0.125], epsilon = 1e-13);
        assert_abs_diff_eq!(profile.alpha_star.unwrap(), 4.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(profile.theta, array![1.0, 5.0 / 6.0, 1.0 / 6.0], epsilon = 1e-13);
    }

    #[test]
    fn irksn_prox_limits() {
        let u = array![3.0, 1.0, 0.5];
        let near_one = prox_irksn_regularizer(u.view(), 2, 1.0 - 1e-12).unwrap();
        assert_abs_diff_eq!(near_one, u, epsilon = 1e-9);
        let half = prox_irksn_regularizer(u.view(), 3, 0.5).unwrap();
        assert_abs_diff_eq!(half, u.mapv(|v| v / 2.0), epsilon = 1e-14);
        assert!(prox_irksn_regularizer(u.view(), 2, 0.0).is_err());
        assert!(prox_irksn_regularizer(u.view(), 2, 1.0).is_err());
        assert!(prox_irksn_regularizer(u.view(), 2, 1.5).is_err());
    }

    #[test]
    fn irksn_prox_frozen_value() {
        // α = 0.5 ⇒ λ = 1; α* = 2 lands on a breakpoint, θ = (1, 1, 0)
        let x = prox_irksn_regularizer(array![3.0, 1.0, 0.5].view(), 2, 0.5).unwrap();
        assert_abs_diff_eq!(x, array![1.5, 0.5, 0.0], epsilon = 1e-13);
    }

    #[test]
    fn single_precision_prox() {
        let (x, _) = prox_half_squared_ksup(array![2.0f32, 4.0].view(), &KSupProxParams::new(2, 1.0)).unwrap();
        assert_abs_diff_eq!(x, array![1.0f32, 2.0], epsilon = 1e-6);
    }

    fn vec_strategy(max_d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 1..=max_d)
    }

    proptest! {
        #[test]
        fn norm_sandwich(w in vec_strategy(20), kfrac in 0.0f64..1.0) {
            let w = Array1::from(w);
            let d = w.len();
            let k = 1 + ((d - 1) as f64 * kfrac).round() as usize;
            let l1 = crate::linalg::norm1(w.view());
            let l2 = crate::linalg::norm2(w.view());
            let ks = ksup_norm(w.view(), k).unwrap();
            prop_assert!(l2 <= ks + 1e-10 * (1.0 + l2));
            prop_assert!(ks <= l1 + 1e-10 * (1.0 + l1));
            prop_assert!((ksup_norm(w.view(), 1).unwrap() - l1).abs() <= 1e-10 * (1.0 + l1));
            prop_assert!((ksup_norm(w.view(), d).unwrap() - l2).abs() <= 1e-10 * (1.0 + l2));
        }

        #[test]
        fn prox_is_non_expansive(
            pair in (1usize..=20).prop_flat_map(|d| (
                prop::collection::vec(-5.0f64..5.0, d),
                prop::collection::vec(-5.0f64..5.0, d),
                1..=d,
            )),
            lambda in 0.01f64..10.0,
        ) {
            let (a, b, k) = pair;
            let (a, b) = (Array1::from(a), Array1::from(b));
            let p = KSupProxParams::new(k, lambda);
            let (pa, _) = prox_half_squared_ksup(a.view(), &p).unwrap();
            let (pb, _) = prox_half_squared_ksup(b.view(), &p).unwrap();
            let lhs = crate::linalg::dist2(pa.view(), pb.view());
            let rhs = crate::linalg::dist2(a.view(), b.view());
            prop_assert!(lhs <= rhs + 1e-9);
        }

        #[test]
        fn theta_sums_to_k(w in vec_strategy(20), kfrac in 0.0f64..1.0, lambda in 0.01f64..10.0) {
            let w = Array1::from(w);
            let nnz = w.iter().filter(|x| **x != 0.0).count();
            prop_assume!(nnz >= 1);
            let k = 1 + ((nnz - 1) as f64 * kfrac).round() as usize;
            let (_, profile) = prox_half_squared_ksup(w.view(), &KSupProxParams::new(k, lambda)).unwrap();
            prop_assert!((profile.theta_sum() - k as f64).abs() <= 1e-9);
            prop_assert!(profile.theta.iter().all(|t| (0.0..=1.0).contains(t)));
            prop_assert!(profile.breakpoints.windows(2).all(|p| p[0] <= p[1]));
        }

        #[test]
        fn small_alpha_prox_support_matches_hard_threshold(
            w in prop::collection::vec(0.5f64..10.0, 2..12),
            signs in prop::collection::vec(any::<bool>(), 12),
            kfrac in 0.0f64..1.0,
        ) {
            // well-separated magnitudes so the top-k set is unambiguous
            let d = w.len();
            let mut mags = w.clone();
            mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(mags.windows(2).all(|p| p[1] - p[0] > 1e-3));
            let u = Array1::from_iter(w.iter().zip(&signs).map(|(m, s)| if *s { *m } else { -*m }));
            let k = 1 + ((d - 1) as f64 * kfrac).round() as usize;
            let x = prox_irksn_regularizer(u.view(), k, 1e-9).unwrap();
            let support: Vec<usize> = (0..d).filter(|&i| x[i] != 0.0).collect();
            let mut top = top_k_indices(u.view(), k).unwrap();
            top.sort_unstable();
            prop_assert_eq!(support, top);
        }
    }
}
