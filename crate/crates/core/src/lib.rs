//! Sparse linear recovery with iterative k-support norm regularization.
//!
//! The crate is organised bottom-up:
//!
//! * [`ksupport`]: k-support norm, its dual, hard thresholding and the
//!   proximal operator of the half-squared norm.
//! * [`solvers`]: IRKSN and the baseline roster (IHT, Lasso, ElasticNet,
//!   penalized k-support, OMP, SRDI, IROSR, IRCR).
//! * [`conditions`]: numerical checks of the recovery conditions and the
//!   early-stopping bound constants.
//! * [`datagen`]: seeded instance generators.
//! * [`metrics`]: support F1, model error and path extraction.
//! * [`harness`]: grid search, multi-seed sweeps and bound verification.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` case.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod datagen;
mod error;
pub mod harness;
pub mod io;
pub mod ksupport;
pub mod linalg;
pub mod metrics;
pub mod problem;
mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::{GroundTruth, ProblemInstance};
pub use scalar::Scalar;

/// Double-precision instance.
pub type Instance = ProblemInstance<f64>;
/// Double-precision ground truth.
pub type Truth = GroundTruth<f64>;
/// Double-precision solver run.
pub type Run = solvers::SolverRun<f64>;
