//! Problem data shared by solvers, checkers and generators.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::Error;
use crate::linalg::{all_finite, dist2, norm2};
use crate::{Result, Scalar};

/// A sparse regression problem `y^δ = X w* + ε` with `‖ε‖ ≤ δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<T> {
    x: Array2<T>,
    y_delta: Array1<T>,
    delta: T,
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn new(x: Array2<T>, y_delta: Array1<T>, delta: T) -> Result<Self> {
        let (n, d) = x.dim();
        if n == 0 || d == 0 {
            return Err(Error::Dimension(format!("design must be non-empty, got {n}x{d}")));
        }
        if y_delta.len() != n {
            return Err(Error::Dimension(format!("target has length {} but design has {n} rows", y_delta.len())));
        }
        if !x.iter().all(|v| v.is_finite()) || !all_finite(y_delta.view()) {
            return Err(Error::Parameter("instance contains non-finite entries".into()));
        }
        if !(delta >= T::zero()) || !delta.is_finite() {
            return Err(Error::Parameter(format!("noise bound must be finite and non-negative, got {delta}")));
        }
        Ok(Self { x, y_delta, delta })
    }

    pub fn x(&self) -> ArrayView2<'_, T> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView1<'_, T> {
        self.y_delta.view()
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// `X w − y^δ`.
    pub fn residual(&self, w: ArrayView1<T>) -> Array1<T> {
        self.x.dot(&w) - &self.y_delta
    }

    /// `½‖X w − y^δ‖²`.
    pub fn loss(&self, w: ArrayView1<T>) -> T {
        let r = norm2(self.residual(w).view());
        r * r / T::lit(2.0)
    }

    pub fn into_parts(self) -> (Array2<T>, Array1<T>, T) {
        (self.x, self.y_delta, self.delta)
    }
}

/// The sparse vector behind an instance, its declared support and the
/// clean target `y = X w*`.
///
/// The declared support is normally `supp(w*)`, but a support that also
/// lists zero coefficients is accepted so that degenerate cases can be
/// analysed; [`GroundTruth::support_is_exact`] tells them apart.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth<T> {
    w_star: Array1<T>,
    support: Vec<usize>,
    y_clean: Array1<T>,
}

impl<T: Scalar> GroundTruth<T> {
    /// Validates index ranges and that `support` holds every nonzero of
    /// `w_star`. The support is stored sorted and deduplicated.
    pub fn new(w_star: Array1<T>, mut support: Vec<usize>, y_clean: Array1<T>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return Err(Error::Parameter("support must be non-empty".into()));
        }
        if let Some(&bad) = support.iter().find(|&&i| i >= w_star.len()) {
            return Err(Error::Dimension(format!("support index {bad} out of range for dimension {}", w_star.len())));
        }
        if let Some(i) = (0..w_star.len()).find(|i| w_star[*i] != T::zero() && support.binary_search(i).is_err()) {
            return Err(Error::Parameter(format!("nonzero coefficient {i} missing from declared support")));
        }
        Ok(Self { w_star, support, y_clean })
    }

    /// Truth with `S = supp(w*)` and `y = X w*`.
    pub fn from_design(x: ArrayView2<T>, w_star: Array1<T>) -> Result<Self> {
        if x.ncols() != w_star.len() {
            return Err(Error::Dimension(format!("w* has length {} but design has {} columns", w_star.len(), x.ncols())));
        }
        let support = (0..w_star.len()).filter(|&i| w_star[i] != T::zero()).collect();
        let y = x.dot(&w_star);
        Self::new(w_star, support, y)
    }

    pub fn w_star(&self) -> ArrayView1<'_, T> {
        self.w_star.view()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Indices outside the support, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.w_star.len()).filter(|i| self.support.binary_search(i).is_err()).collect()
    }

    pub fn y_clean(&self) -> ArrayView1<'_, T> {
        self.y_clean.view()
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn support_is_exact(&self) -> bool {
        self.support.iter().all(|&i| self.w_star[i] != T::zero())
    }

    /// Whether `y_clean = X w*` holds to `tol` relative to `max(1, ‖y‖)`.
    pub fn is_paired_with(&self, instance: &ProblemInstance<T>, tol: T) -> bool {
        if instance.d() != self.w_star.len() || instance.n() != self.y_clean.len() {
            return false;
        }
        let xw = instance.x().dot(&self.w_star);
        dist2(xw.view(), self.y_clean.view()) <= tol * norm2(self.y_clean.view()).max(T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn instance_validation() {
        assert!(ProblemInstance::new(Array2::<f64>::eye(2), array![1.0, 2.0], 0.0).is_ok());
        assert!(matches!(ProblemInstance::new(Array2::<f64>::eye(2), array![1.0], 0.0), Err(Error::Dimension(_))));
        assert!(ProblemInstance::new(Array2::<f64>::eye(2), array![1.0, f64::NAN], 0.0).is_err());
        assert!(ProblemInstance::new(Array2::<f64>::eye(2), array![1.0, 2.0], -1.0).is_err());
        assert!(ProblemInstance::new(Array2::<f64>::zeros((0, 2)), array![], 0.0).is_err());
    }

    #[test]
    fn truth_support_bookkeeping() {
        let t = GroundTruth::from_design(Array2::<f64>::eye(4).view(), array![0.0, 2.0, 0.0, -1.0]).unwrap();
        assert_eq!(t.support(), &[1, 3]);
        assert_eq!(t.complement(), vec![0, 2]);
        assert!(t.support_is_exact());
        let loose = GroundTruth::new(array![0.0, 2.0], vec![1, 0], array![0.0, 2.0]).unwrap();
        assert_eq!(loose.support(), &[0, 1]);
        assert!(!loose.support_is_exact());
        assert!(GroundTruth::new(array![1.0, 2.0], vec![1], array![1.0, 2.0]).is_err());
        assert!(GroundTruth::new(array![1.0, 2.0], vec![5], array![1.0, 2.0]).is_err());
    }

    #[test]
    fn pairing() {
        let inst = ProblemInstance::new(Array2::<f64>::eye(2), array![1.0, 0.0], 0.0).unwrap();
        let t = GroundTruth::from_design(inst.x(), array![1.0, 0.0]).unwrap();
        assert!(t.is_paired_with(&inst, 1e-10));
        assert_eq!(inst.loss(array![1.0, 0.0].view()), 0.0);
    }
}
