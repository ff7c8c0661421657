//! Experiment orchestration: grids, multi-seed sweeps and bound checks.

mod bound;
mod config;
mod grid;
mod sweep;

pub use bound::{sample_bound_cases, verify_bound_sweep, AlphaSpec, BoundCase, BoundOptions, BoundReport, BoundRow, CaseFamilies};
pub use config::{ExperimentConfig, Fixed, SelectionMode, Sweep, SweepVariable};
pub use grid::{f1_trace, run_grid, Algorithm, Grid, GridOptions, GridOutcome, Selection, DECADES, IRKSN_ALPHAS, PATH_EPS, PATH_POINTS};
pub use sweep::{
    aggregate, instance_seed, run_sweep, spec_for, write_aggregate_csv, write_sweep_csv, write_trace_csv, AggregateResult, AggregateRow,
    SeedBest, AGGREGATE_CSV_HEADER, SWEEP_CSV_HEADER, TRACE_CSV_HEADER,
};
