//! Experiment configuration files.
//!
//! ```toml
//! name = "n_sweep"
//! seeds = [0, 1, 2, 3, 4]
//! algorithms = ["irksn", "iht", "srdi", "irosr", "ircr", "lasso"]
//! max_iter = 20000            # optional
//! output_dir = "out/n_sweep"    # optional
//! selection = "oracle_f1"     # or "holdout_mse"
//! holdout_fraction = 0.2      # used by holdout_mse
//! trace_every = 100           # optional: F1 of the winning cell every 100 iterations
//!
//! [sweep]
//! variable = "n"              # one of n, snr, rho
//! values = [10, 30, 50, 70, 90]
//!
//! [fixed]                     # every non-swept variable plus d and k
//! d = 50
//! k = 10
//! rho = 0.5
//! snr = 1.0
//!
//! [grids.irksn]               # optional overrides of the default grids
//! alpha = [0.001, 0.01]
//! ```
//!
//! Unknown keys are rejected with an error naming them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::grid::{Algorithm, Grid, Selection};
use crate::error::{param, Error};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    N,
    Snr,
    Rho,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::N => "n",
            SweepVariable::Snr => "snr",
            SweepVariable::Rho => "rho",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    pub d: usize,
    pub k: usize,
    pub n: Option<usize>,
    pub rho: Option<f64>,
    pub snr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    #[default]
    OracleF1,
    HoldoutMse,
}

fn default_max_iter() -> usize {
    20_000
}

fn default_holdout() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<String>,
    pub sweep: Sweep,
    pub fixed: Fixed,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub selection: SelectionMode,
    #[serde(default = "default_holdout")]
    pub holdout_fraction: f64,
    /// Base seed mixed into every instance seed.
    #[serde(default)]
    pub base_seed: u64,
    /// Record the F1 of each unit's winning cell every this many iterations.
    #[serde(default)]
    pub trace_every: Option<usize>,
    #[serde(default)]
    pub grids: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse().map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return param("`seeds` is empty");
        }
        if self.algorithms.is_empty() {
            return param("`algorithms` is empty");
        }
        if self.sweep.values.is_empty() {
            return param("`sweep.values` is empty");
        }
        if self.max_iter < 2 {
            return param(format!("`max_iter` must be at least 2, got {}", self.max_iter));
        }
        for v in &self.sweep.values {
            if self.sweep.variable == SweepVariable::N && (*v < 1.0 || v.fract() != 0.0) {
                return param(format!("`sweep.values` entry {v} is not a positive integer"));
            }
        }
        let f = &self.fixed;
        let missing = |name: &str| Error::Parameter(format!("`fixed.{name}` is required when not swept"));
        match self.sweep.variable {
            SweepVariable::N => {
                f.rho.ok_or_else(|| missing("rho"))?;
                f.snr.ok_or_else(|| missing("snr"))?;
            }
            SweepVariable::Snr => {
                f.n.ok_or_else(|| missing("n"))?;
                f.rho.ok_or_else(|| missing("rho"))?;
            }
            SweepVariable::Rho => {
                f.n.ok_or_else(|| missing("n"))?;
                f.snr.ok_or_else(|| missing("snr"))?;
            }
        }
        if f.k == 0 || f.k > f.d {
            return param(format!("`fixed.k` = {} outside 1..={}", f.k, f.d));
        }
        if self.trace_every == Some(0) {
            return param("`trace_every` must be at least 1");
        }
        for name in self.grids.keys() {
            if !self.algorithms.contains(name) {
                return param(format!("`grids.{name}` names an algorithm that is not listed in `algorithms`"));
            }
        }
        self.grids()?;
        if self.selection == SelectionMode::HoldoutMse && !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return param(format!("`holdout_fraction` must lie in (0, 1), got {}", self.holdout_fraction));
        }
        Ok(())
    }

    pub fn selection(&self) -> Selection {
        match self.selection {
            SelectionMode::OracleF1 => Selection::OracleF1,
            SelectionMode::HoldoutMse => Selection::HoldoutMse { fraction: self.holdout_fraction },
        }
    }

    /// Default grids with the configured overrides applied, in listed order.
    pub fn grids(&self) -> Result<Vec<Grid>> {
        self.algorithms
            .iter()
            .map(|name| {
                let algorithm: Algorithm = name.parse().map_err(|_| Error::Parse(format!("unknown algorithm `{name}` in `algorithms`")))?;
                let mut grid = Grid::default_for(algorithm, self.fixed.k);
                for (axis, values) in self.grids.get(name).into_iter().flatten() {
                    if !algorithm.param_names().contains(&axis.as_str()) {
                        return param(format!("unknown key `grids.{name}.{axis}`"));
                    }
                    grid = grid.with_axis(axis, values.clone())?;
                }
                Ok(grid)
            })
            .collect()
    }
}
