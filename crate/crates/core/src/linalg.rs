//! Dense linear-algebra helpers: a thin SVD, the Moore-Penrose
//! pseudo-inverse built on it, and the matrix norms the solvers need.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Default relative cutoff for treating singular values as zero.
pub const DEFAULT_RCOND: f64 = 1e-10;

/// Thin singular value decomposition `M = U diag(s) Vᵀ`.
///
/// For an `m × n` input, `u` is `m × r`, `s` has length `r` and `v` is
/// `n × r` with `r = min(m, n)`. Singular values are sorted non-increasing.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Array2<T>,
    pub s: Array1<T>,
    pub v: Array2<T>,
}

impl<T: Scalar> Svd<T> {
    /// Thin SVD via nalgebra's bidiagonalisation (always carried out in
    /// `f64`), re-sorted so singular values are non-increasing.
    pub fn compute(m: ArrayView2<T>) -> Self {
        let (rows, cols) = m.dim();
        let dm = nalgebra::DMatrix::<f64>::from_fn(rows, cols, |i, j| m[[i, j]].to_f64_lossy());
        let svd = nalgebra::linalg::SVD::new(dm, true, true);
        let u_n = svd.u.expect("left singular vectors requested");
        let vt_n = svd.v_t.expect("right singular vectors requested");
        let r = svd.singular_values.len();
        let mut order: Vec<usize> = (0..r).collect();
        let sv = &svd.singular_values;
        order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));

        let mut u = Array2::<T>::zeros((rows, r));
        let mut s = Array1::<T>::zeros(r);
        let mut v = Array2::<T>::zeros((cols, r));
        for (dst, &src) in order.iter().enumerate() {
            s[dst] = T::lit(sv[src]);
            for i in 0..rows {
                u[[i, dst]] = T::lit(u_n[(i, src)]);
            }
            for i in 0..cols {
                v[[i, dst]] = T::lit(vt_n[(src, i)]);
            }
        }
        Svd { u, s, v }
    }

    pub fn largest(&self) -> T {
        self.s.iter().copied().fold(T::zero(), T::max)
    }

    pub fn smallest(&self) -> T {
        self.s.iter().copied().fold(T::infinity(), T::min)
    }

    /// Number of singular values above `rcond · σ_max`.
    pub fn rank(&self, rcond: T) -> usize {
        let cut = rcond * self.largest();
        self.s.iter().filter(|&&x| x > cut).count()
    }

    /// `V diag(1/s) Uᵀ`, dropping singular values at or below `rcond · σ_max`.
    pub fn pseudo_inverse(&self, rcond: T) -> Array2<T> {
        let cut = rcond * self.largest();
        let (m, _) = self.u.dim();
        let n = self.v.nrows();
        let mut out = Array2::<T>::zeros((n, m));
        for (j, &sigma) in self.s.iter().enumerate() {
            if sigma <= cut || sigma == T::zero() {
                continue;
            }
            let inv = T::one() / sigma;
            let vj = self.v.column(j);
            let uj = self.u.column(j);
            for r in 0..n {
                let f = vj[r] * inv;
                if f == T::zero() {
                    continue;
                }
                let mut row = out.row_mut(r);
                row.scaled_add(f, &uj);
            }
        }
        out
    }
}

/// Moore-Penrose pseudo-inverse with singular values below `rcond · σ_max`
/// treated as zero.
pub fn pseudo_inverse<T: Scalar>(m: ArrayView2<T>, rcond: T) -> Array2<T> {
    if m.is_empty() {
        return Array2::zeros((m.ncols(), m.nrows()));
    }
    Svd::compute(m).pseudo_inverse(rcond)
}

/// Which matrix norm stands in for `‖X‖` in step sizes and bound constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixNorm {
    /// Largest singular value.
    #[default]
    Spectral,
    /// Sum of singular values.
    Nuclear,
}

impl MatrixNorm {
    pub fn of<T: Scalar>(self, m: ArrayView2<T>) -> T {
        match self {
            MatrixNorm::Spectral => spectral_norm(m),
            MatrixNorm::Nuclear => nuclear_norm(m),
        }
    }
}

impl std::str::FromStr for MatrixNorm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" | "operator" => Ok(MatrixNorm::Spectral),
            "nuclear" => Ok(MatrixNorm::Nuclear),
            other => Err(crate::Error::Parameter(format!("unknown matrix norm `{other}`"))),
        }
    }
}

pub fn spectral_norm<T: Scalar>(m: ArrayView2<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    Svd::compute(m).largest()
}

pub fn nuclear_norm<T: Scalar>(m: ArrayView2<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    Svd::compute(m).s.sum()
}

pub fn norm2<T: Scalar>(v: ArrayView1<T>) -> T {
    // scaled accumulation keeps huge and tiny entries from over/underflowing
    let scale = v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let ss = v.iter().fold(T::zero(), |acc, &x| {
        let y = x / scale;
        acc + y * y
    });
    scale * ss.sqrt()
}

pub fn norm1<T: Scalar>(v: ArrayView1<T>) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x.abs())
}

pub fn norm_inf<T: Scalar>(v: ArrayView1<T>) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn dist2<T: Scalar>(a: ArrayView1<T>, b: ArrayView1<T>) -> T {
    norm2((&a - &b).view())
}

/// Columns of `m` at `idx`, in the given order.
pub fn select_columns<T: Scalar>(m: ArrayView2<T>, idx: &[usize]) -> Array2<T> {
    m.select(Axis(1), idx)
}

pub fn all_finite<T: Scalar>(v: ArrayView1<T>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Least-squares solution of `m x ≈ b` with minimum norm.
pub fn lstsq_min_norm<T: Scalar>(m: ArrayView2<T>, b: ArrayView1<T>) -> Array1<T> {
    pseudo_inverse(m, T::lit(DEFAULT_RCOND)).dot(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn random(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn pinv_of_identity_is_identity() {
        let i = Array2::<f64>::eye(4);
        let p = pseudo_inverse(i.view(), 1e-10);
        assert_abs_diff_eq!(p, i, epsilon = 1e-14);
    }

    #[test]
    fn pinv_of_singular_diagonal() {
        let m = array![[2.0, 0.0], [0.0, 0.0]];
        let p = pseudo_inverse(m.view(), 1e-10);
        assert_abs_diff_eq!(p, array![[0.5, 0.0], [0.0, 0.0]], epsilon = 1e-15);
    }

    #[test]
    fn pinv_left_inverse_for_full_column_rank() {
        let m = random(5, 3, 7);
        let p = pseudo_inverse(m.view(), 1e-10);
        assert_abs_diff_eq!(p.dot(&m), Array2::<f64>::eye(3), epsilon = 1e-10);
    }

    #[test]
    fn penrose_conditions_on_wide_rank_deficient() {
        let a = random(3, 2, 1);
        let b = random(2, 6, 2);
        let m = a.dot(&b); // 3x6, rank 2
        let p = pseudo_inverse(m.view(), 1e-10);
        assert_abs_diff_eq!(m.dot(&p).dot(&m), m, epsilon = 1e-10);
        assert_abs_diff_eq!(p.dot(&m).dot(&p), p, epsilon = 1e-10);
        let mp = m.dot(&p);
        assert_abs_diff_eq!(mp.t(), mp, epsilon = 1e-10);
        let pm = p.dot(&m);
        assert_abs_diff_eq!(pm.t(), pm, epsilon = 1e-10);
        assert_eq!(Svd::compute(m.view()).rank(1e-10), 2);
    }

    #[test]
    fn svd_reconstructs() {
        let m = random(6, 4, 3);
        let svd = Svd::compute(m.view());
        let rebuilt = svd.u.dot(&Array2::from_diag(&svd.s)).dot(&svd.v.t());
        assert_abs_diff_eq!(rebuilt, m, epsilon = 1e-12);
        assert!(svd.s.windows(2).into_iter().all(|w| w[0] >= w[1]));
    }

    #[test]
    fn norms_of_diagonal() {
        let m = array![[3.0, 0.0], [0.0, -4.0]];
        assert_abs_diff_eq!(spectral_norm(m.view()), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(nuclear_norm(m.view()), 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(MatrixNorm::Spectral.of(m.view()), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn single_precision_svd() {
        let m = array![[1.0f32, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let p = pseudo_inverse(m.view(), 1e-6);
        assert_abs_diff_eq!(p.dot(&m), Array2::<f32>::eye(2), epsilon = 1e-4);
    }
}
