//! Orthogonal matching pursuit (Pati, Rezaiifar and Krishnaprasad, 1993).
//!
//! Each round adds the unselected column with the largest normalised
//! correlation `|xⱼᵀr|/‖xⱼ‖` (lowest index on ties) and refits least squares
//! on the selected columns. Stops early once the residual vanishes.

use ndarray::Array1;

use crate::error::param;
use crate::linalg::{lstsq_min_norm, norm2, select_columns};
use crate::{ProblemInstance, Result, Scalar};

pub fn omp<T: Scalar>(instance: &ProblemInstance<T>, k: usize) -> Result<Array1<T>> {
    let (n, d) = (instance.n(), instance.d());
    if k == 0 || k > n.min(d) {
        return param(format!("omp needs 1 ≤ k ≤ min(n, d) = {}, got {k}", n.min(d)));
    }
    let x = instance.x();
    let y = instance.y();
    let col_norms: Vec<T> = (0..d).map(|j| norm2(x.column(j))).collect();
    let stop = T::lit(1e-14) * norm2(y).max(T::min_positive_value());

    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut coef = Array1::<T>::zeros(0);
    let mut residual = y.to_owned();
    for _ in 0..k {
        if norm2(residual.view()) <= stop {
            break;
        }
        let corr = x.t().dot(&residual);
        let mut best: Option<(usize, T)> = None;
        for j in 0..d {
            if col_norms[j] == T::zero() || selected.contains(&j) {
                continue;
            }
            let score = corr[j].abs() / col_norms[j];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let Some((j, _)) = best else { break };
        selected.push(j);
        let xs = select_columns(x, &selected);
        coef = lstsq_min_norm(xs.view(), y);
        residual = &y - &xs.dot(&coef);
    }

    let mut w = Array1::zeros(d);
    for (c, &j) in coef.iter().zip(&selected) {
        w[j] = *c;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn identity_picks_largest_entries() {
        let y = array![0.5, -3.0, 1.0, 2.0];
        let inst = ProblemInstance::<f64>::new(Array2::eye(4), y, 0.0).unwrap();
        approx::assert_abs_diff_eq!(omp(&inst, 2).unwrap(), array![0.0, -3.0, 0.0, 2.0], epsilon = 1e-14);
    }

    #[test]
    fn one_sparse_exact() {
        let x = array![[1.0, 0.6, 0.0], [0.0, 0.8, 1.0], [0.0, 0.0, 0.0]];
        let y = x.column(1).mapv(|v| 2.5 * v);
        let inst = ProblemInstance::<f64>::new(x, y, 0.0).unwrap();
        let w = omp(&inst, 1).unwrap();
        assert!((w[1] - 2.5).abs() < 1e-12 && w[0] == 0.0 && w[2] == 0.0);
    }

    #[test]
    fn k_range_checked() {
        let inst = ProblemInstance::<f64>::new(Array2::<f64>::eye(2), array![1.0, 1.0], 0.0).unwrap();
        assert!(omp(&inst, 0).is_err());
        assert!(omp(&inst, 3).is_err());
    }
}
