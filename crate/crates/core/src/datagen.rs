//! Seeded instance generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with normal
//! variates from `rand_distr::StandardNormal`, drawn in `f64` and converted
//! to the target scalar. Independent sub-seeds are taken from separate
//! ChaCha streams via [`sub_seed`]. Bitwise equality across implementations
//! is not a goal; distributions are.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{param, Error};
use crate::linalg::{norm2, select_columns, Svd};
use crate::{GroundTruth, ProblemInstance, Result, Scalar};

/// Derives an independent seed for stream `stream` of `seed`.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_add(1));
    rng.next_u64()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn cast<T: Scalar>(a: &Array2<f64>) -> Array2<T> {
    a.mapv(T::lit)
}

fn cast1<T: Scalar>(a: &Array1<f64>) -> Array1<T> {
    a.mapv(T::lit)
}

/// Parameters of the autoregressive correlated design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub k_true: usize,
    pub rho: f64,
    pub snr: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return param("n and d must be at least 1");
        }
        if self.k_true == 0 || self.k_true > self.d {
            return param(format!("k_true={} outside 1..={}", self.k_true, self.d));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return param(format!("rho must lie in [0, 1), got {}", self.rho));
        }
        if !(self.snr > 0.0) || !self.snr.is_finite() {
            return param(format!("snr must be positive, got {}", self.snr));
        }
        Ok(())
    }
}

/// Rows with `X₁ ~ N(0,1)`, `X_{j+1} = ρX_j + √(1−ρ²)Δ`; support uniform of
/// size `k_true` with standard normal values; Gaussian noise rescaled so
/// that `‖Xw*‖/‖ε‖ = snr` exactly, and `δ = ‖ε‖`.
pub fn gen_correlated<T: Scalar>(spec: &SyntheticSpec) -> Result<(ProblemInstance<T>, GroundTruth<T>)> {
    spec.validate()?;
    let SyntheticSpec { n, d, k_true, rho, snr, seed } = *spec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = (1.0 - rho * rho).sqrt();
    let mut x = Array2::<f64>::zeros((n, d));
    for i in 0..n {
        x[[i, 0]] = normal(&mut rng);
        for j in 1..d {
            x[[i, j]] = rho * x[[i, j - 1]] + sigma * normal(&mut rng);
        }
    }
    let mut support = sample(&mut rng, d, k_true).into_vec();
    support.sort_unstable();
    let mut w = Array1::<f64>::zeros(d);
    for &j in &support {
        // a draw of exactly zero would shrink the support
        let mut v = 0.0;
        while v == 0.0 {
            v = normal(&mut rng);
        }
        w[j] = v;
    }
    let signal = x.dot(&w);
    let mut eps = Array1::from_iter((0..n).map(|_| normal(&mut rng)));
    let scale = norm2(signal.view()) / (norm2(eps.view()) * snr);
    eps.mapv_inplace(|e| e * scale);
    let delta = norm2(eps.view());
    let y = &signal + &eps;

    let xt = cast::<T>(&x);
    let truth = GroundTruth::new(cast1(&w), support, xt.dot(&cast1::<T>(&w)))?;
    Ok((ProblemInstance::new(xt, cast1(&y), T::lit(delta))?, truth))
}

/// Mixing weights of the two dependent columns of the illustrating example.
pub const EXAMPLE1_W3: [f64; 3] = [9.0 / 11.0, 6.0 / 11.0, 2.0 / 11.0];
pub const EXAMPLE1_W4: [f64; 3] = [1.0 / 3.0, 14.0 / 15.0, 2.0 / 15.0];
/// Generating vector of the illustrating example.
pub const EXAMPLE1_WY: [f64; 5] = [1.0, 1.0, -4.0, 0.0, 0.0];

const EXAMPLE1_ATTEMPTS: usize = 100;

/// The five-column illustrating example: three Gaussian generating columns
/// (4 rows), two exact mixtures of them, and the noiseless target
/// `y = X·(1, 1, −4, 0, 0)`. The generating block is redrawn until its
/// smallest singular value exceeds `1e-6`.
pub fn gen_example1<T: Scalar>(seed: u64) -> Result<(ProblemInstance<T>, GroundTruth<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..EXAMPLE1_ATTEMPTS {
        let xs = Array2::from_shape_fn((4, 3), |_| normal(&mut rng));
        if Svd::compute(xs.view()).smallest() <= 1e-6 {
            continue;
        }
        let mut x = Array2::<f64>::zeros((4, 5));
        x.slice_mut(ndarray::s![.., 0..3]).assign(&xs);
        x.column_mut(3).assign(&xs.dot(&Array1::from(EXAMPLE1_W3.to_vec())));
        x.column_mut(4).assign(&xs.dot(&Array1::from(EXAMPLE1_W4.to_vec())));
        let xt = cast::<T>(&x);
        let truth = GroundTruth::from_design(xt.view(), cast1(&Array1::from(EXAMPLE1_WY.to_vec())))?;
        let y = truth.y_clean().to_owned();
        return Ok((ProblemInstance::new(xt, y, T::zero())?, truth));
    }
    Err(Error::Generator(format!("no well-conditioned draw in {EXAMPLE1_ATTEMPTS} attempts")))
}

/// Rows `xᵢ = yᵢ w* + γᵢ` with `‖w*‖ = 1`: `yᵢ ~ N(0,1)`, and `γᵢ` has
/// `min(3, d−k)` active coordinates drawn uniformly off the support with
/// `N(0,1)` values. Support magnitudes are `U[1,2]` with random signs
/// before normalisation. The instance is noiseless.
pub fn gen_example2<T: Scalar>(n: usize, d: usize, k: usize, seed: u64) -> Result<(ProblemInstance<T>, GroundTruth<T>)> {
    gen_example2_with(n, d, k, 3, seed)
}

/// [`gen_example2`] with `active` nuisance coordinates per row.
pub fn gen_example2_with<T: Scalar>(
    n: usize,
    d: usize,
    k: usize,
    active: usize,
    seed: u64,
) -> Result<(ProblemInstance<T>, GroundTruth<T>)> {
    if n == 0 || k == 0 || k >= d {
        return param(format!("example 2 needs n ≥ 1 and 1 ≤ k < d, got n={n}, d={d}, k={k}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support = sample(&mut rng, d, k).into_vec();
    support.sort_unstable();
    let off: Vec<usize> = (0..d).filter(|i| support.binary_search(i).is_err()).collect();
    let mut w = Array1::<f64>::zeros(d);
    for &j in &support {
        let m: f64 = rng.random_range(1.0..2.0);
        w[j] = if rng.random_bool(0.5) { m } else { -m };
    }
    let wn = norm2(w.view());
    w.mapv_inplace(|v| v / wn);

    let m = active.min(off.len());
    let y = Array1::from_iter((0..n).map(|_| normal(&mut rng)));
    let mut x = Array2::<f64>::zeros((n, d));
    for i in 0..n {
        for &j in &support {
            x[[i, j]] = y[i] * w[j];
        }
        for pos in sample(&mut rng, off.len(), m) {
            x[[i, off[pos]]] = normal(&mut rng);
        }
    }
    let xt = cast::<T>(&x);
    let yt = cast1::<T>(&y);
    let truth = GroundTruth::new(cast1(&w), support, yt.clone())?;
    Ok((ProblemInstance::new(xt, yt, T::zero())?, truth))
}

/// Replaces the target by `y + ε` with Gaussian `ε` scaled to `‖ε‖ = δ`
/// exactly, and records `δ`.
pub fn with_noise<T: Scalar>(instance: &ProblemInstance<T>, truth: &GroundTruth<T>, delta: f64, seed: u64) -> Result<ProblemInstance<T>> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return param(format!("noise level must be non-negative, got {delta}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = Array1::from_iter((0..instance.n()).map(|_| normal(&mut rng)));
    let scale = if delta == 0.0 { 0.0 } else { delta / norm2(eps.view()) };
    let y = &truth.y_clean() + &eps.mapv(|e| T::lit(e * scale));
    ProblemInstance::new(instance.x().to_owned(), y, T::lit(delta))
}

/// Whether the generating block of an example-1 style instance is
/// numerically full column rank.
pub fn support_is_well_conditioned<T: Scalar>(instance: &ProblemInstance<T>, truth: &GroundTruth<T>, min_sv: f64) -> bool {
    let xs = select_columns(instance.x(), truth.support());
    Svd::compute(xs.view()).smallest() > T::lit(min_sv)
}
