use irksn::datagen::{gen_correlated, SyntheticSpec};
use irksn::harness::{
    run_grid, run_sweep, sample_bound_cases, verify_bound_sweep, write_aggregate_csv, write_sweep_csv, Algorithm, AlphaSpec, BoundOptions,
    CaseFamilies, ExperimentConfig, Grid, GridOptions, Selection, AGGREGATE_CSV_HEADER,
};

const CONFIG: &str = r#"
name = "small"
seeds = [0, 1]
algorithms = ["irksn", "lasso", "omp"]
max_iter = 300
[sweep]
variable = "n"
values = [15, 25]
[fixed]
d = 20
k = 3
rho = 0.2
snr = 4.0
[grids.irksn]
alpha = [0.01, 0.1]
"#;

#[test]
fn sweeps_are_deterministic_and_complete() {
    let cfg: ExperimentConfig = CONFIG.parse().unwrap();
    let a = run_sweep(&cfg, Some(1)).unwrap();
    assert_eq!(a.rows.len(), 3 * 2);
    assert!(a.rows.iter().all(|r| r.per_seed.len() == 2));
    assert!(a.rows.iter().all(|r| (0.0..=1.0).contains(&r.mean_f1)));
    assert_eq!(a, run_sweep(&cfg, Some(3)).unwrap());

    let dir = std::env::temp_dir().join(format!("irksn-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    write_sweep_csv(&dir.join("s.csv"), &a).unwrap();
    write_aggregate_csv(&dir.join("a.csv"), &a).unwrap();
    assert_eq!(std::fs::read_to_string(dir.join("s.csv")).unwrap().lines().count(), 1 + 12);
    assert!(std::fs::read_to_string(dir.join("a.csv")).unwrap().starts_with(AGGREGATE_CSV_HEADER));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn base_seed_changes_the_instances() {
    let cfg: ExperimentConfig = CONFIG.parse().unwrap();
    let mut other = cfg.clone();
    other.base_seed = 9;
    let a = run_sweep(&cfg, Some(1)).unwrap();
    let b = run_sweep(&other, Some(1)).unwrap();
    assert_ne!(a.rows[0].per_seed[0].instance_seed, b.rows[0].per_seed[0].instance_seed);
}

#[test]
fn grid_search_keeps_the_best_cell() {
    let spec = SyntheticSpec { n: 25, d: 20, k_true: 3, rho: 0.0, snr: 20.0, seed: 5 };
    let (inst, truth) = gen_correlated::<f64>(&spec).unwrap();
    let grid = Grid::default_for(Algorithm::Omp, 3);
    let out = run_grid(&inst, &truth, &grid, &GridOptions { max_iter: 100, seed: 5, selection: Selection::OracleF1 }).unwrap();
    assert_eq!(out.best.f1, 1.0);
    assert_eq!(out.cells_skipped, 0);

    let holdout = GridOptions { max_iter: 100, seed: 5, selection: Selection::HoldoutMse { fraction: 0.2 } };
    let out = run_grid(&inst, &truth, &Grid::default_for(Algorithm::Lasso, 3), &holdout).unwrap();
    assert!(out.best.f1 > 0.0);
}

#[test]
fn sampled_bound_cases_satisfy_the_bound() {
    let cases = sample_bound_cases(4, &[0.0, 0.05], 3, &CaseFamilies::default()).unwrap();
    assert_eq!(cases.len(), 8);
    let report =
        verify_bound_sweep(&cases, &[AlphaSpec::FractionOfMax(0.5)], &BoundOptions { max_iter: 300, ..Default::default() }).unwrap();
    assert_eq!(report.rows.len(), 8);
    assert!(report.holds(1e-9), "min slack {}", report.min_slack());
}
