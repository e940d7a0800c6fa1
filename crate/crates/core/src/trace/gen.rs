use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Weibull};
use serde::{Deserialize, Serialize};

use super::{BinTrace, Request, Trace, TraceError};

/// Generalized harmonic number `H(n, s) = sum_{r=1..n} r^-s`.
pub fn harmonic_number(n: usize, skew: f64) -> f64 {
    (1..=n).map(|r| (r as f64).powf(-skew)).sum()
}

/// Draws `num_requests` i.i.d. requests with `P(rank r) ∝ r^-skew`.
///
/// Sampling is inverse-CDF over a precomputed cumulative table, so every
/// draw consumes exactly one `f64` from the seeded stream.
pub fn gen_zipf(
    num_objects: usize,
    num_requests: usize,
    skew: f64,
    seed: u64,
) -> Result<Trace, TraceError> {
    if num_objects == 0 {
        return Err(TraceError::InvalidParameter("num_objects must be >= 1".into()));
    }
    if num_requests == 0 {
        return Err(TraceError::InvalidParameter("num_requests must be >= 1".into()));
    }
    if !(skew.is_finite() && skew > 0.0) {
        return Err(TraceError::InvalidParameter(format!("skew must be > 0, got {skew}")));
    }

    let mut cdf = Vec::with_capacity(num_objects);
    let mut acc = 0.0;
    for r in 1..=num_objects {
        acc += (r as f64).powf(-skew);
        cdf.push(acc);
    }
    let total = acc;
    for c in &mut cdf {
        *c /= total;
    }
    // Guard against rounding leaving the last bucket short of 1.0.
    *cdf.last_mut().unwrap() = 1.0;

    let width = num_objects.to_string().len().max(4);
    let keys: Vec<String> = (1..=num_objects)
        .map(|r| format!("obj_{r:0width$}"))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let requests = (0..num_requests)
        .map(|_| {
            let u: f64 = rng.random();
            let rank = cdf.partition_point(|&c| c <= u).min(num_objects - 1);
            Request::unit(keys[rank].clone())
        })
        .collect();

    Ok(Trace::new(
        format!("zipf-n{num_objects}-r{num_requests}-a{skew:.4}-s{seed}"),
        requests,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ItemDistribution {
    /// Sizes in absolute units, rounded to the nearest integer.
    Weibull { shape: f64, scale: f64 },
    /// Sizes as a fraction of bin capacity.
    Gaussian { mean: f64, std: f64 },
}

pub fn gen_bin_items(
    count: usize,
    dist: ItemDistribution,
    capacity: u64,
    seed: u64,
) -> Result<BinTrace, TraceError> {
    if count == 0 {
        return Err(TraceError::InvalidParameter("count must be >= 1".into()));
    }
    if capacity == 0 {
        return Err(TraceError::InvalidParameter("capacity must be >= 1".into()));
    }
    let clamp = |x: f64| -> u64 { (x.round().max(1.0) as u64).min(capacity) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (items, tag): (Vec<u64>, String) = match dist {
        ItemDistribution::Weibull { shape, scale } => {
            if !(shape > 0.0 && scale > 0.0) {
                return Err(TraceError::InvalidParameter(format!(
                    "weibull parameters must be positive, got shape={shape} scale={scale}"
                )));
            }
            let d = Weibull::new(scale, shape)
                .map_err(|e| TraceError::InvalidParameter(e.to_string()))?;
            (
                (0..count).map(|_| clamp(d.sample(&mut rng))).collect(),
                format!("weibull-k{shape}-l{scale}"),
            )
        }
        ItemDistribution::Gaussian { mean, std } => {
            if !(mean > 0.0 && std >= 0.0) {
                return Err(TraceError::InvalidParameter(format!(
                    "gaussian parameters invalid: mean={mean} std={std}"
                )));
            }
            let d = Normal::new(mean, std)
                .map_err(|e| TraceError::InvalidParameter(e.to_string()))?;
            let cap = capacity as f64;
            (
                (0..count)
                    .map(|_| clamp(d.sample(&mut rng) * cap))
                    .collect(),
                format!("gauss-m{mean}-sd{std}"),
            )
        }
    };
    BinTrace::new(format!("{tag}-c{capacity}-n{count}-s{seed}"), capacity, items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zipf_single_object_universe() {
        let t = gen_zipf(1, 5, 1.0, 7).unwrap();
        assert_eq!(t.requests.len(), 5);
        assert!(t.requests.iter().all(|r| r.key == "obj_0001" && r.size == 1));
    }

    #[test]
    fn zipf_is_seeded() {
        let a = gen_zipf(1000, 5000, 1.0, 42).unwrap();
        let b = gen_zipf(1000, 5000, 1.0, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_zipf(1000, 5000, 1.0, 43).unwrap();
        assert_ne!(a.requests, c.requests);
    }

    #[test]
    fn zipf_rejects_bad_parameters() {
        assert!(gen_zipf(0, 5, 1.0, 1).is_err());
        assert!(gen_zipf(5, 0, 1.0, 1).is_err());
        assert!(gen_zipf(5, 5, 0.0, 1).is_err());
        assert!(gen_zipf(5, 5, -1.0, 1).is_err());
    }

    #[test]
    fn gaussian_zero_variance() {
        let t = gen_bin_items(3, ItemDistribution::Gaussian { mean: 0.5, std: 0.0 }, 100, 9).unwrap();
        assert_eq!(t.items, vec![50, 50, 50]);
    }

    #[test]
    fn gaussian_suite_params_clamped() {
        let t = gen_bin_items(
            10,
            ItemDistribution::Gaussian { mean: 0.3662, std: 0.1416 },
            100,
            2,
        )
        .unwrap();
        assert_eq!(t.items.len(), 10);
        assert!(t.items.iter().all(|&x| (1..=100).contains(&x)));
    }

    #[test]
    fn bin_items_rejects_zero_count() {
        let d = ItemDistribution::Weibull { shape: 3.0, scale: 45.0 };
        assert!(gen_bin_items(0, d, 100, 1).is_err());
    }
}
