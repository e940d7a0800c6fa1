mod common;

use common::{explore_case, power_of_two_violations, zipf_rank1_share};
use forge_core::feedback::{cluster, distinct_count, CentroidSet, FeedbackEmbedding, Fraction};

fn emb(v: &[(u64, u64)]) -> FeedbackEmbedding {
    FeedbackEmbedding::new("s", v.iter().map(|&(n, d)| Fraction::new(n, d)).collect())
}

#[test]
fn distinct_count_ignores_order_and_duplicates() {
    let a = emb(&[(1, 2), (1, 3)]);
    let b = emb(&[(2, 4), (2, 6)]);
    let c = emb(&[(1, 3), (1, 2)]);
    let base = vec![a.clone(), c.clone()];
    assert_eq!(distinct_count(&base), 2);
    // b equals a as fractions
    assert_eq!(distinct_count(&[a.clone(), b, c.clone()]), 2);
    assert_eq!(distinct_count(&[c.clone(), a.clone(), a.clone(), c.clone(), a]), 2);
    assert_eq!(distinct_count(&[] as &[FeedbackEmbedding]), 0);
}

#[test]
fn density_is_count_over_max_distance() {
    let mut cs = CentroidSet::new("s");
    cs.push("origin", emb(&[(0, 1), (0, 1)]));
    cs.push("far", emb(&[(1, 1), (1, 1)]));
    let members = vec![
        ("m1".to_string(), emb(&[(2, 5), (0, 1)])),
        ("m2".to_string(), emb(&[(0, 1), (1, 5)])),
        ("m3".to_string(), emb(&[(1, 10), (1, 10)])),
    ];
    let r = cluster(&members, &cs).unwrap();
    assert_eq!(r[0].count, 3);
    assert_eq!(r[0].max_distance, 0.4);
    assert_eq!(r[0].density, Some(7.5));
    assert_eq!(r[1].count, 0);
    assert_eq!(r[1].density, None);
    assert!(!r[1].degenerate);
}

#[test]
fn explore_maximizes_min_distance() {
    for seed in 0..100 {
        explore_case(seed).unwrap();
    }
}

#[test]
fn power_of_two_never_picks_the_farther_candidate() {
    assert_eq!(power_of_two_violations(1000), 0);
}

#[test]
fn zipf_rank_one_frequency() {
    let want = 1.0 / (1..=1000).map(|r| 1.0 / r as f64).sum::<f64>();
    assert!((want - 0.1336).abs() < 5e-5);
    let got = zipf_rank1_share();
    assert!((got - want).abs() <= 0.01, "{got} vs {want}");
}
