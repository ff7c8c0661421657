//! Recovery conditions and early-stopping constants.
//!
//! With `S` the true support, `X_S` the corresponding columns and `x_ℓ` the
//! `ℓ`-th column of `X`:
//!
//! * **A1** (minimum norm): `w*_S` is the minimum-norm solution of
//!   `X_S v = y`, i.e. `w*_S = X_S† y`.
//! * **A2** (k-support): `max_{ℓ∉S} |⟨X_S†x_ℓ, w*_S⟩| < min_{j∈S} |⟨X_S†x_j, w*_S⟩|`.
//! * **A3** (ℓ1): `X_S` injective and `max_{ℓ∉S} |⟨X_S†x_ℓ, sgn(w*_S)⟩| < 1`.
//!
//! The early-stopping bound `‖ŵₜ − w*‖ ≤ a·t·δ + b/t` for IRKSN needs A1, A2
//! and `α < η/‖w*‖∞` with
//! `η = min_{j∈S} |⟨(X_S X_Sᵀ)†y, x_j⟩| − max_{ℓ∉S} |⟨(X_S X_Sᵀ)†y, x_ℓ⟩|`,
//! and then `a = 4/‖X‖`, `b = 2‖X‖·‖(X_Sᵀ)†w*_S‖/α`.
//!
//! Strict inequalities are decided with a small tolerance; values within it
//! of equality are reported as [`Verdict::Boundary`], which does not count
//! as holding. A maximum over an empty complement is 0.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};

use crate::error::Error;
use crate::linalg::{dist2, norm2, norm_inf, pseudo_inverse, select_columns, MatrixNorm, Svd, DEFAULT_RCOND};
use crate::{GroundTruth, ProblemInstance, Result, Scalar};

/// Numerical cutoffs of the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionOptions {
    /// Relative singular-value cutoff of pseudo-inverses.
    pub rcond: f64,
    /// `X_S` counts as injective when `σ_min > injectivity · σ_max`.
    pub injectivity: f64,
    /// Tolerance of the A1 residual checks.
    pub min_norm_tol: f64,
    /// Half-width of the boundary band around strict inequalities.
    pub strict_tol: f64,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self { rcond: DEFAULT_RCOND, injectivity: 1e-8, min_norm_tol: 1e-8, strict_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Boundary,
    Fails,
}

impl Verdict {
    /// `lhs < rhs`, with `|lhs − rhs| ≤ tol·max(1, |rhs|)` reported as boundary.
    pub fn strict_less<T: Scalar>(lhs: T, rhs: T, tol: f64) -> Self {
        let band = T::lit(tol) * rhs.abs().max(T::one());
        if (lhs - rhs).abs() <= band {
            Verdict::Boundary
        } else if lhs < rhs {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Boundary => "boundary",
            Verdict::Fails => "fails",
        }
    }
}

/// Which recovery guarantees apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// A2 holds, A3 does not.
    OursOnly,
    /// Both hold.
    L1AndOurs,
    /// A3 holds, A2 does not.
    L1Only,
    Neither,
}

impl Region {
    pub fn from_verdicts(a2: bool, a3: bool) -> Self {
        match (a2, a3) {
            (true, false) => Region::OursOnly,
            (true, true) => Region::L1AndOurs,
            (false, true) => Region::L1Only,
            (false, false) => Region::Neither,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::OursOnly => "ours_only",
            Region::L1AndOurs => "l1_and_ours",
            Region::L1Only => "l1_only",
            Region::Neither => "neither",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours_only" => Ok(Region::OursOnly),
            "l1_and_ours" => Ok(Region::L1AndOurs),
            "l1_only" => Ok(Region::L1Only),
            "neither" => Ok(Region::Neither),
            other => Err(Error::Parse(format!("unknown region `{other}`"))),
        }
    }
}

/// Both sides of A2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsupCondition<T> {
    pub lhs: T,
    pub rhs: T,
    pub verdict: Verdict,
}

/// The quantity of A3 and the injectivity of `X_S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Condition<T> {
    pub value: T,
    pub injective: bool,
    pub verdict: Verdict,
}

/// Everything the checks compute for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<T> {
    pub l1_condition_value: T,
    pub ours_lhs: T,
    pub ours_rhs: T,
    pub xs_injective: bool,
    pub min_norm_holds: bool,
    pub a2: Verdict,
    pub a3: Verdict,
    /// Margin of the early-stopping theorem (may be non-positive).
    pub eta: T,
    /// `η/‖w*‖∞`, present only when `η > 0`.
    pub alpha_max: Option<T>,
    pub region: Region,
}

impl<T: Scalar> ConditionReport<T> {
    /// `key = value` lines, one per field.
    pub fn to_kv_string(&self) -> String {
        let f = |v: T| crate::io::toml_float(v.to_f64_lossy());
        let mut lines = vec![
            format!("l1_condition_value = {}", f(self.l1_condition_value)),
            format!("ours_lhs = {}", f(self.ours_lhs)),
            format!("ours_rhs = {}", f(self.ours_rhs)),
            format!("xs_injective = {}", self.xs_injective),
            format!("min_norm_holds = {}", self.min_norm_holds),
            format!("assumption2 = \"{}\"", self.a2.as_str()),
            format!("assumption3 = \"{}\"", self.a3.as_str()),
            format!("eta = {}", f(self.eta)),
        ];
        if let Some(a) = self.alpha_max {
            lines.push(format!("alpha_max = {}", f(a)));
        }
        lines.push(format!("region = \"{}\"", self.region));
        lines.join("\n") + "\n"
    }
}

/// Constants of the early-stopping bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryBound<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// `⌈c δ^{−1/2}⌉`; `None` for a noiseless instance.
    pub t_delta: Option<u64>,
}

impl<T: Scalar> TheoryBound<T> {
    /// `a·t·δ + b/t`.
    pub fn at(&self, t: usize, delta: T) -> T {
        let t = T::from_usize_lossy(t);
        self.a * t * delta + self.b / t
    }

    /// `t_δ` clipped to the bound's domain `t ≥ 2`.
    pub fn stopping_time(&self) -> Option<u64> {
        self.t_delta.map(|t| t.max(2))
    }
}

struct Projections<T> {
    /// `X_S† X`, `k × d`.
    coeffs: Array2<T>,
    pinv: Array2<T>,
    xs: Array2<T>,
}

fn projections<T: Scalar>(instance: &ProblemInstance<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> Result<Projections<T>> {
    if instance.d() != truth.w_star().len() || instance.n() != truth.y_clean().len() {
        return Err(Error::Dimension("ground truth does not match the instance".into()));
    }
    let xs = select_columns(instance.x(), truth.support());
    let pinv = pseudo_inverse(xs.view(), T::lit(opts.rcond));
    let coeffs = pinv.dot(&instance.x());
    Ok(Projections { coeffs, pinv, xs })
}

fn w_support<T: Scalar>(truth: &GroundTruth<T>) -> Array1<T> {
    Array1::from_iter(truth.support().iter().map(|&i| truth.w_star()[i]))
}

fn split_extrema<T: Scalar>(truth: &GroundTruth<T>, values: &Array1<T>) -> (T, T) {
    let lhs = truth.complement().iter().map(|&l| values[l]).fold(T::zero(), T::max);
    let rhs = truth.support().iter().map(|&j| values[j]).fold(T::infinity(), T::min);
    (lhs, rhs)
}

/// A1 with the tolerances of `opts`.
pub fn check_assumption1<T: Scalar>(instance: &ProblemInstance<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> Result<bool> {
    let p = projections(instance, truth, opts)?;
    Ok(min_norm_from(&p, truth, opts))
}

fn min_norm_from<T: Scalar>(p: &Projections<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> bool {
    let tol = T::lit(opts.min_norm_tol);
    let ws = w_support(truth);
    let y = truth.y_clean();
    let fit = dist2(p.xs.dot(&ws).view(), y) <= tol * norm2(y);
    let min_norm = dist2(ws.view(), p.pinv.dot(&y).view()) <= tol * norm2(ws.view()).max(T::one());
    fit && min_norm
}

pub fn check_assumption2<T: Scalar>(
    instance: &ProblemInstance<T>,
    truth: &GroundTruth<T>,
    opts: &ConditionOptions,
) -> Result<KsupCondition<T>> {
    let p = projections(instance, truth, opts)?;
    Ok(ksup_from(&p, truth, opts))
}

fn ksup_from<T: Scalar>(p: &Projections<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> KsupCondition<T> {
    let values = p.coeffs.t().dot(&w_support(truth)).mapv(|v| v.abs());
    let (lhs, rhs) = split_extrema(truth, &values);
    KsupCondition { lhs, rhs, verdict: Verdict::strict_less(lhs, rhs, opts.strict_tol) }
}

pub fn check_assumption3_l1<T: Scalar>(
    instance: &ProblemInstance<T>,
    truth: &GroundTruth<T>,
    opts: &ConditionOptions,
) -> Result<L1Condition<T>> {
    let p = projections(instance, truth, opts)?;
    Ok(l1_from(&p, truth, opts))
}

fn l1_from<T: Scalar>(p: &Projections<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> L1Condition<T> {
    let signs = w_support(truth).mapv(|v| if v == T::zero() { T::zero() } else { v.signum() });
    let values = p.coeffs.t().dot(&signs).mapv(|v| v.abs());
    let (value, _) = split_extrema(truth, &values);
    let svd = Svd::compute(p.xs.view());
    let injective = p.xs.ncols() <= p.xs.nrows() && svd.smallest() > T::lit(opts.injectivity) * svd.largest();
    let verdict = if injective { Verdict::strict_less(value, T::one(), opts.strict_tol) } else { Verdict::Fails };
    L1Condition { value, injective, verdict }
}

/// `|⟨(X_S X_Sᵀ)†y, x_j⟩|` for every column `j`.
pub fn theorem_correlations<T: Scalar>(instance: &ProblemInstance<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> Array1<T> {
    let xs = select_columns(instance.x(), truth.support());
    let gram = xs.dot(&xs.t());
    let g = pseudo_inverse(gram.view(), T::lit(opts.rcond)).dot(&truth.y_clean());
    instance.x().t().dot(&g).mapv(|v| v.abs())
}

/// Runs every check and classifies the instance.
pub fn analyze<T: Scalar>(instance: &ProblemInstance<T>, truth: &GroundTruth<T>, opts: &ConditionOptions) -> Result<ConditionReport<T>> {
    let p = projections(instance, truth, opts)?;
    let a2 = ksup_from(&p, truth, opts);
    let a3 = l1_from(&p, truth, opts);
    let (lo, hi) = split_extrema(truth, &theorem_correlations(instance, truth, opts));
    let eta = hi - lo;
    let winf = norm_inf(truth.w_star());
    let alpha_max = (eta > T::zero() && winf > T::zero()).then(|| eta / winf);
    Ok(ConditionReport {
        l1_condition_value: a3.value,
        ours_lhs: a2.lhs,
        ours_rhs: a2.rhs,
        xs_injective: a3.injective,
        min_norm_holds: min_norm_from(&p, truth, opts),
        a2: a2.verdict,
        a3: a3.verdict,
        eta,
        alpha_max,
        region: classify_region_parts(a2.verdict, a3.verdict),
    })
}

fn classify_region_parts(a2: Verdict, a3: Verdict) -> Region {
    Region::from_verdicts(a2.holds(), a3.holds())
}

pub fn classify_region<T: Scalar>(report: &ConditionReport<T>) -> Region {
    classify_region_parts(report.a2, report.a3)
}

/// Bound constants for IRKSN at `alpha`, or the violated condition.
pub fn theorem1_constants<T: Scalar>(
    instance: &ProblemInstance<T>,
    truth: &GroundTruth<T>,
    alpha: T,
    c: T,
    norm: MatrixNorm,
    opts: &ConditionOptions,
) -> Result<(TheoryBound<T>, ConditionReport<T>)> {
    let report = analyze(instance, truth, opts)?;
    if !report.min_norm_holds {
        return Err(Error::Assumption("assumption 1 (minimum-norm solution on the support) fails".into()));
    }
    if !report.a2.holds() {
        return Err(Error::Assumption(format!(
            "assumption 2 is {} (lhs {} vs rhs {})",
            report.a2.as_str(),
            report.ours_lhs,
            report.ours_rhs
        )));
    }
    let Some(alpha_max) = report.alpha_max else {
        return Err(Error::Assumption(format!("theorem margin eta = {} is not positive", report.eta)));
    };
    if !(alpha > T::zero() && alpha < alpha_max && alpha < T::one()) {
        return Err(Error::Assumption(format!("alpha = {alpha} outside (0, min(1, alpha_max = {alpha_max}))")));
    }
    if !(c > T::zero()) {
        return Err(Error::Parameter(format!("c must be positive, got {c}")));
    }
    let nx = norm.of(instance.x());
    let xs = select_columns(instance.x(), truth.support());
    let lift = pseudo_inverse(xs.t(), T::lit(opts.rcond)).dot(&w_support(truth));
    let delta = instance.delta();
    let t_delta = (delta > T::zero()).then(|| (c / delta.sqrt()).ceil().to_f64_lossy() as u64);
    let bound = TheoryBound { a: T::lit(4.0) / nx, b: T::lit(2.0) * nx * norm2(lift.view()) / alpha, c, t_delta };
    Ok((bound, report))
}
