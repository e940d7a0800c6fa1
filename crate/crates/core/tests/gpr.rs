mod common;

use common::{blr_predict, gpr_case};
use forge_core::gpr::{factorization_count, Feature, GprModel};

#[test]
fn fuzzed_instances_match_the_linear_solve_oracle() {
    for seed in 0..50 {
        let c = gpr_case(seed);
        assert!(c.oracle_error <= 1e-8, "seed {seed}: oracle error {}", c.oracle_error);
        assert!(c.interpolation_error <= 1e-4, "seed {seed}: interpolation error {}", c.interpolation_error);
        assert!(c.double_sum_exact, "seed {seed}: double sum differs");
        assert!(c.permutation_exact, "seed {seed}: stimulus order changed the model");
    }
}

#[test]
fn ridge_closed_form_three_points() {
    let xs = [vec![1.0, 0.5], vec![-0.25, 2.0], vec![0.75, 0.75]];
    let ys = [vec![0.2, 0.9], vec![0.6, 0.1], vec![0.4, 0.4]];
    let f: Vec<Feature> = xs.iter().map(|x| Feature::from_f64(x)).collect();
    let m = GprModel::fit(&f, &ys, 0.5, 1e-2).unwrap();
    for q in [vec![0.3, -0.2], vec![1.0, 1.0]] {
        let got = m.predict_raw(&Feature::from_f64(&q)).unwrap();
        let want = blr_predict(&xs, &ys, 0.5, 1e-2, &q);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
    }
}

#[test]
fn all_targets_share_one_factorization() {
    let f: Vec<Feature> = (0..6).map(|i| Feature::from_f64(&[i as f64 * 0.1, 1.0 - i as f64 * 0.05])).collect();
    let ys: Vec<Vec<f64>> = (0..6).map(|i| (0..30).map(|t| ((i * 7 + t) % 10) as f64 / 10.0).collect()).collect();
    let before = factorization_count();
    let m = GprModel::fit(&f, &ys, 0.0, 1e-2).unwrap();
    assert_eq!(factorization_count(), before + 1);
    for x in &f {
        let p = m.predict(x).unwrap();
        assert_eq!(p.len(), 30);
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }
    assert_eq!(factorization_count(), before + 1);
}
