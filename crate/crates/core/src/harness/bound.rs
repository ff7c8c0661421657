//! Numerical verification of the IRKSN early-stopping bound
//! `‖ŵₜ − w*‖ ≤ a·t·δ + b/t` for `t ≥ 2`.

use ndarray::Array1;

use crate::conditions::{analyze, theorem1_constants, ConditionOptions, TheoryBound};
use crate::datagen::{gen_correlated, gen_example2, sub_seed, with_noise, SyntheticSpec};
use crate::error::{param, Error};
use crate::linalg::{dist2, MatrixNorm};
use crate::solvers::{irksn_observed, IrksnConfig, Observer, Step};
use crate::{GroundTruth, ProblemInstance, Result};

/// Instance under test.
#[derive(Debug, Clone)]
pub struct BoundCase {
    pub label: String,
    pub instance: ProblemInstance<f64>,
    pub truth: GroundTruth<f64>,
}

/// Step parameter of a bound run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    Value(f64),
    /// `f · min(1, alpha_max)` for the instance.
    FractionOfMax(f64),
}

impl AlphaSpec {
    pub fn resolve(self, alpha_max: f64) -> f64 {
        match self {
            AlphaSpec::Value(a) => a,
            AlphaSpec::FractionOfMax(f) => f * alpha_max.min(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub max_iter: usize,
    /// Constant of the stopping time `⌈c δ^{−1/2}⌉`.
    pub c: f64,
    pub norm: MatrixNorm,
    pub conditions: ConditionOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { max_iter: 2000, c: 1.0, norm: MatrixNorm::Spectral, conditions: ConditionOptions::default() }
    }
}

/// Outcome for one (instance, α) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub label: String,
    pub delta: f64,
    pub alpha: f64,
    pub alpha_max: f64,
    pub bound: TheoryBound<f64>,
    /// Smallest `bound − error` over `t ∈ [2, max_iter]`.
    pub min_slack: f64,
    pub worst_t: usize,
    pub max_slack: f64,
    pub final_error: f64,
}

impl BoundRow {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_slack >= -tol
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.holds(tol))
    }

    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(|r| r.min_slack).fold(f64::INFINITY, f64::min)
    }

    pub const CSV_HEADER: &'static str = "label,delta,alpha,alpha_max,a,b,t_delta,min_slack,worst_t,max_slack,final_error";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let td = r.bound.stopping_time().map(|t| t.to_string()).unwrap_or_default();
            s += &format!(
                "{},{},{},{},{},{},{td},{},{},{},{}\n",
                r.label, r.delta, r.alpha, r.alpha_max, r.bound.a, r.bound.b, r.min_slack, r.worst_t, r.max_slack, r.final_error
            );
        }
        s
    }
}

struct SlackTracker<'a> {
    w_star: &'a Array1<f64>,
    bound: TheoryBound<f64>,
    delta: f64,
    min: (f64, usize),
    max: f64,
    last_error: f64,
}

impl Observer<f64> for SlackTracker<'_> {
    fn wants(&self, t: usize) -> bool {
        t >= 2
    }

    fn observe(&mut self, step: &Step<'_, f64>) {
        let err = dist2(step.w, self.w_star.view());
        let slack = self.bound.at(step.t, self.delta) - err;
        if slack < self.min.0 {
            self.min = (slack, step.t);
        }
        self.max = self.max.max(slack);
        self.last_error = err;
    }
}

/// Runs IRKSN on every case at every `alpha`, tracking the bound slack at
/// each `t ∈ [2, max_iter]`. A case violating the assumptions is rejected
/// with its label and the failing condition.
pub fn verify_bound_sweep(cases: &[BoundCase], alphas: &[AlphaSpec], options: &BoundOptions) -> Result<BoundReport> {
    if options.max_iter < 2 {
        return param(format!("max_iter must be at least 2, got {}", options.max_iter));
    }
    let mut rows = Vec::new();
    for case in cases {
        let label_err = |e: Error| match e {
            Error::Assumption(m) => Error::Assumption(format!("{}: {m}", case.label)),
            other => other,
        };
        let report = analyze(&case.instance, &case.truth, &options.conditions).map_err(label_err)?;
        let alpha_max = report.alpha_max.unwrap_or(0.0);
        for spec in alphas {
            let alpha = spec.resolve(alpha_max);
            let (bound, _) =
                theorem1_constants(&case.instance, &case.truth, alpha, options.c, options.norm, &options.conditions).map_err(label_err)?;
            let w_star = case.truth.w_star().to_owned();
            let delta = case.instance.delta();
            let mut tracker =
                SlackTracker { w_star: &w_star, bound, delta, min: (f64::INFINITY, 0), max: f64::NEG_INFINITY, last_error: f64::NAN };
            let config = IrksnConfig::new(case.truth.k(), alpha, options.max_iter).norm(options.norm);
            irksn_observed(&case.instance, &config, &mut tracker)?;
            rows.push(BoundRow {
                label: case.label.clone(),
                delta,
                alpha,
                alpha_max,
                bound,
                min_slack: tracker.min.0,
                worst_t: tracker.min.1,
                max_slack: tracker.max,
                final_error: tracker.last_error,
            });
        }
    }
    Ok(BoundReport { rows })
}

/// Instance families drawn by [`sample_bound_cases`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseFamilies {
    /// Example-2 shape `(n, d, k)`.
    pub example2: (usize, usize, usize),
    /// Correlated design `(n, d, k, ρ)`, kept only when A1, A2 and `η > 0` hold.
    pub correlated: (usize, usize, usize, f64),
    pub max_attempts: usize,
}

impl Default for CaseFamilies {
    fn default() -> Self {
        Self { example2: (30, 50, 3), correlated: (30, 50, 2, 0.1), max_attempts: 1000 }
    }
}

/// `count` base instances alternating between the Example-2 family and
/// accepted correlated draws, each paired with every noise level in
/// `deltas`.
pub fn sample_bound_cases(count: usize, deltas: &[f64], seed: u64, families: &CaseFamilies) -> Result<Vec<BoundCase>> {
    let opts = ConditionOptions::default();
    let accepted = |inst: &ProblemInstance<f64>, truth: &GroundTruth<f64>| -> Result<bool> {
        let r = analyze(inst, truth, &opts)?;
        Ok(r.min_norm_holds && r.a2.holds() && r.alpha_max.is_some())
    };
    let mut bases = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while bases.len() < count {
        if attempt as usize >= families.max_attempts {
            return Err(Error::Generator(format!("only {} of {count} accepted instances after {attempt} draws", bases.len())));
        }
        let s = sub_seed(seed, attempt);
        attempt += 1;
        let (label, inst, truth) = if bases.len() % 2 == 0 {
            let (n, d, k) = families.example2;
            let (i, t) = gen_example2::<f64>(n, d, k, s)?;
            ("example2", i, t)
        } else {
            let (n, d, k_true, rho) = families.correlated;
            let (i, t) = gen_correlated::<f64>(&SyntheticSpec { n, d, k_true, rho, snr: 1.0, seed: s })?;
            ("correlated", i, t)
        };
        if accepted(&inst, &truth)? {
            bases.push((format!("{label}-{attempt}"), inst, truth));
        }
    }
    let mut cases = Vec::with_capacity(count * deltas.len());
    for (label, inst, truth) in bases {
        for (j, &delta) in deltas.iter().enumerate() {
            let noisy = with_noise(&inst, &truth, delta, sub_seed(seed ^ 0x5eed, j as u64 + 1))?;
            cases.push(BoundCase { label: format!("{label}-d{delta}"), instance: noisy, truth: truth.clone() });
        }
    }
    Ok(cases)
}
