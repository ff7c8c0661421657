use irksn::datagen::{gen_correlated, gen_example1, gen_example2, sub_seed, with_noise, SyntheticSpec, EXAMPLE1_WY};
use irksn::linalg::norm2;
use ndarray::Array1;

fn spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec { n: 30, d: 50, k_true: 10, rho: 0.5, snr: 3.0, seed }
}

#[test]
fn correlated_draws_are_reproducible() {
    let (a, ta) = gen_correlated::<f64>(&spec(7)).unwrap();
    let (b, tb) = gen_correlated::<f64>(&spec(7)).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    let (c, _) = gen_correlated::<f64>(&spec(8)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn correlated_draw_respects_spec() {
    let (inst, truth) = gen_correlated::<f64>(&spec(3)).unwrap();
    assert_eq!((inst.n(), inst.d()), (30, 50));
    assert_eq!(truth.support().len(), 10);
    assert!(truth.support_is_exact());
    let noise = &inst.y() - &truth.y_clean();
    assert!((norm2(noise.view()) - inst.delta()).abs() < 1e-12);
    assert!((norm2(truth.y_clean()) / norm2(noise.view()) - 3.0).abs() < 1e-12);
}

#[test]
fn invalid_specs_are_rejected() {
    for s in [
        SyntheticSpec { rho: 1.0, ..spec(0) },
        SyntheticSpec { snr: 0.0, ..spec(0) },
        SyntheticSpec { k_true: 51, ..spec(0) },
        SyntheticSpec { n: 0, ..spec(0) },
    ] {
        assert!(gen_correlated::<f64>(&s).is_err(), "{s:?}");
    }
}

#[test]
fn sub_seeds_separate_streams() {
    assert_eq!(sub_seed(4, 1), sub_seed(4, 1));
    assert_ne!(sub_seed(4, 1), sub_seed(4, 2));
    assert_ne!(sub_seed(4, 1), sub_seed(5, 1));
}

#[test]
fn example1_is_consistent() {
    let (inst, truth) = gen_example1::<f64>(1).unwrap();
    assert_eq!((inst.n(), inst.d()), (4, 5));
    assert_eq!(truth.w_star().to_vec(), EXAMPLE1_WY.to_vec());
    assert_eq!(inst.delta(), 0.0);
    let fitted = inst.x().dot(&Array1::from(EXAMPLE1_WY.to_vec()));
    assert!(norm2((&fitted - &inst.y()).view()) < 1e-12);
}

#[test]
fn example2_has_unit_truth_and_exact_noise() {
    let (inst, truth) = gen_example2::<f64>(30, 50, 3, 11).unwrap();
    assert!((norm2(truth.w_star()) - 1.0).abs() < 1e-12);
    assert_eq!(truth.support().len(), 3);
    let noisy = with_noise(&inst, &truth, 0.1, 2).unwrap();
    assert!((norm2((&noisy.y() - &truth.y_clean()).view()) - 0.1).abs() < 1e-12);
    assert_eq!(noisy.delta(), 0.1);
    assert!(with_noise(&inst, &truth, -1.0, 2).is_err());
}
