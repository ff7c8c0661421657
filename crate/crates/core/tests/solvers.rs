use irksn::datagen::{gen_correlated, gen_example1, SyntheticSpec};
use irksn::linalg::{norm2, MatrixNorm};
use irksn::metrics::{model_error, support_of};
use irksn::solvers::{
    elasticnet_path, iht, ircr, irksn, irosr, lambda_grid, lasso_path, omp, srdi, IhtConfig, IrcrConfig, IrksnConfig, IrosrConfig,
    PathConfig, SrdiConfig,
};
use irksn::{GroundTruth, ProblemInstance};
use ndarray::{array, Array2};

fn orthogonal() -> (ProblemInstance<f64>, GroundTruth<f64>) {
    let x = Array2::<f64>::eye(6) * 2.0;
    let truth = GroundTruth::from_design(x.view(), array![3.0, 0.0, -1.0, 0.0, 0.0, 0.0]).unwrap();
    (ProblemInstance::new(x, truth.y_clean().to_owned(), 0.0).unwrap(), truth)
}

fn final_error(run: &irksn::Run, truth: &GroundTruth<f64>) -> f64 {
    model_error(run.last().unwrap().w.view(), truth)
}

#[test]
fn every_iterative_method_recovers_an_orthogonal_design() {
    let (inst, truth) = orthogonal();
    let runs = [
        irksn(&inst, &IrksnConfig::new(2, 0.1, 5000)).unwrap(),
        iht(&inst, &IhtConfig::new(2, 0.2, 2000)).unwrap(),
        srdi(&inst, &SrdiConfig::new(1.0, 0.1, 5000)).unwrap(),
        irosr(&inst, &IrosrConfig::new(0.01, 0.1, 20000)).unwrap(),
        ircr(&inst, &IrcrConfig::new(5000)).unwrap(),
    ];
    for run in &runs {
        assert!(final_error(run, &truth) < 1e-3, "{} error {}", run.algorithm, final_error(run, &truth));
    }
    assert!(model_error(omp(&inst, 2).unwrap().view(), &truth) < 1e-12);
}

#[test]
fn irksn_reaches_the_sparse_solution_of_example1() {
    let (inst, truth) = gen_example1::<f64>(1).unwrap();
    let run = irksn(&inst, &IrksnConfig::new(3, 1.0 / 30.0, 20000).record_every(100)).unwrap();
    let last = &run.last().unwrap().w;
    assert!(model_error(last.view(), &truth) < 1e-6);
    assert_eq!(support_of(last.view(), 1e-8), vec![0, 1, 2]);
    assert_eq!(run.snapshots.len(), 200);
}

#[test]
fn irksn_step_depends_on_the_matrix_norm() {
    let (inst, _) = gen_example1::<f64>(1).unwrap();
    let cfg = IrksnConfig::new(3, 0.05, 10);
    let spectral = irksn::solvers::Irksn::new(&inst, &cfg).unwrap().gamma();
    let nuclear = irksn::solvers::Irksn::new(&inst, &cfg.norm(MatrixNorm::Nuclear)).unwrap().gamma();
    assert!(nuclear < spectral);
}

#[test]
fn invalid_configurations_are_rejected() {
    let (inst, _) = orthogonal();
    assert!(irksn(&inst, &IrksnConfig::new(0, 0.1, 10)).is_err());
    assert!(irksn(&inst, &IrksnConfig::new(2, 1.5, 10)).is_err());
    assert!(iht(&inst, &IhtConfig::new(7, 0.1, 10)).is_err());
    assert!(srdi(&inst, &SrdiConfig::new(-1.0, 0.1, 10)).is_err());
    assert!(omp(&inst, 0).is_err());
}

#[test]
fn paths_run_from_empty_to_dense() {
    let spec = SyntheticSpec { n: 20, d: 30, k_true: 4, rho: 0.3, snr: 5.0, seed: 2 };
    let (inst, _) = gen_correlated::<f64>(&spec).unwrap();
    let lambdas = lambda_grid(&inst, 1.0, 20, 1e-3).unwrap();
    assert!(lambdas.windows(2).all(|w| w[0] > w[1]));
    let lasso = lasso_path(&inst, &lambdas, &PathConfig::default()).unwrap();
    assert_eq!(lasso.len(), 20);
    assert_eq!(norm2(lasso[0].w.view()), 0.0);
    assert!(support_of(lasso[19].w.view(), 1e-8).len() > 4);
    let enet = elasticnet_path(&inst, &lambda_grid(&inst, 0.5, 20, 1e-3).unwrap(), 0.5, &PathConfig::default()).unwrap();
    assert_eq!(norm2(enet[0].w.view()), 0.0);
}

#[test]
fn runs_are_deterministic() {
    let (inst, _) = gen_example1::<f64>(2).unwrap();
    let cfg = IrksnConfig::new(3, 0.01, 500).record_every(50);
    assert_eq!(irksn(&inst, &cfg).unwrap(), irksn(&inst, &cfg).unwrap());
}
