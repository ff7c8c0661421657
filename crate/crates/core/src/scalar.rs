//! Scalar abstraction shared by every numeric routine in the crate.

use ndarray::NdFloat;
use num_traits::FromPrimitive;

/// Real floating-point scalar the solvers are generic over.
///
/// Implemented for `f32` and `f64`. Literal constants are produced through
/// [`Scalar::lit`], which panics only if the target type cannot represent a
/// finite `f64` literal (never the case for the two built-in floats).
pub trait Scalar: NdFloat + FromPrimitive + Default {
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar literal out of range")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// IEEE total order; NaN sorts above every number.
    #[inline]
    fn total_order(self, other: Self) -> std::cmp::Ordering {
        self.to_f64_lossy().total_cmp(&other.to_f64_lossy())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
