//! Frozen oracles shared by the integration tests. Every expected value
//! below was traced by hand from the policy definitions; the step notes
//! record the trace.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use forge_core::binpack::{make_bin_heuristic, pack_observed, BinHeuristic};
use forge_core::cache::{make_baseline_policy, simulate_observed, BaselineName, PolicyParams};
use forge_core::trace::{BinTrace, Trace};

pub struct CacheOracle {
    pub policy: BaselineName,
    pub trace: &'static str,
    pub capacity: u64,
    pub hits: u64,
    pub misses: u64,
    /// Cache contents after the last request.
    pub resident: &'static [&'static str],
}

pub const CACHE_ORACLES: &[CacheOracle] = &[
    // a b c | a hit | d evicts b | b evicts c | e evicts a | a evicts d
    CacheOracle { policy: BaselineName::Lru, trace: "a b c a d b e a", capacity: 3, hits: 1, misses: 7, resident: &["b", "e", "a"] },
    // a b c | a hit | d evicts a | b hit | e evicts b | a evicts c
    CacheOracle { policy: BaselineName::Fifo, trace: "a b c a d b e a", capacity: 3, hits: 2, misses: 6, resident: &["d", "e", "a"] },
    // x,y reach freq 2; z evicts x (least recently accessed of the tie); y hits
    CacheOracle { policy: BaselineName::Lfu, trace: "x y x y z y", capacity: 2, hits: 3, misses: 3, resident: &["y", "z"] },
    // a reaches 2; c, b, d each evict the lone freq-1 object; a hits; c evicts d
    CacheOracle { policy: BaselineName::Lfu, trace: "a a b c b d a c", capacity: 2, hits: 2, misses: 6, resident: &["a", "c"] },
    // a's bit is set by the hit, so c's victim is b; b then evicts a, a evicts c
    CacheOracle { policy: BaselineName::Clock, trace: "a b a c b a", capacity: 2, hits: 1, misses: 5, resident: &["b", "a"] },
    // hand clears a and evicts b, then c, then d; the final a hits
    CacheOracle { policy: BaselineName::Sieve, trace: "a b c a d b e a", capacity: 3, hits: 2, misses: 6, resident: &["a", "b", "e"] },
    // c evicts b (t1 > p=0); b is a b1 ghost hit, p=1, evicts a from t2;
    // c hits; a is a b2 ghost hit, p=0, evicts b from t2
    CacheOracle { policy: BaselineName::Arc, trace: "a b a c b c a", capacity: 2, hits: 2, misses: 5, resident: &["c", "a"] },
    // capacity 5, protected 4: a is protected by its hit; f evicts b, b evicts c from probation; a hits
    CacheOracle { policy: BaselineName::Slru, trace: "a b a c d e f b a", capacity: 5, hits: 2, misses: 7, resident: &["a", "d", "e", "f", "b"] },
    // protected holds 1: b's hit demotes a to probation; c evicts a, a evicts c
    CacheOracle { policy: BaselineName::Slru, trace: "a b a b c a", capacity: 2, hits: 2, misses: 4, resident: &["b", "a"] },
    // small target 1, ghost 3: d promotes a and evicts b (ghost); e evicts c (ghost);
    // b and c return to main evicting d, e; d returns to main, a is reinserted, b evicted
    CacheOracle { policy: BaselineName::S3fifo, trace: "a b c a d e a b c d", capacity: 3, hits: 2, misses: 8, resident: &["c", "a", "d"] },
    // window 1: a and b spill to main while space is free; d and e lose the
    // admission contest against b (1 vs 1) and a (3 vs 1)
    CacheOracle { policy: BaselineName::Tinylfu, trace: "a b a c a d b e a", capacity: 3, hits: 4, misses: 5, resident: &["a", "b", "e"] },
    // b (estimate 2) beats main's a (1) and is admitted; d and a lose to b
    CacheOracle { policy: BaselineName::Tinylfu, trace: "a b b c d b a", capacity: 2, hits: 2, misses: 5, resident: &["b", "a"] },
];

pub struct BinOracle {
    pub policy: BinHeuristic,
    pub capacity: u64,
    pub items: &'static [u64],
    /// Bin index chosen for each item.
    pub bins: &'static [usize],
    pub bins_used: u64,
    pub lower_bound: u64,
}

pub const BIN_ORACLES: &[BinOracle] = &[
    // 6 | 5 4 | 3 7 | 2
    BinOracle { policy: BinHeuristic::NextFit, capacity: 10, items: &[6, 5, 4, 3, 7, 2], bins: &[0, 1, 1, 2, 2, 3], bins_used: 4, lower_bound: 3 },
    BinOracle { policy: BinHeuristic::FirstFit, capacity: 10, items: &[6, 5, 4, 3, 7, 2], bins: &[0, 1, 0, 1, 2, 1], bins_used: 3, lower_bound: 3 },
    BinOracle { policy: BinHeuristic::FirstFit, capacity: 10, items: &[5, 6, 2, 4, 3], bins: &[0, 1, 0, 1, 0], bins_used: 2, lower_bound: 2 },
    // 2 goes to the tighter bin (4 left), stranding 3
    BinOracle { policy: BinHeuristic::BestFit, capacity: 10, items: &[5, 6, 2, 4, 3], bins: &[0, 1, 1, 0, 2], bins_used: 3, lower_bound: 2 },
    // 3 goes to the emptier bin (4 left), stranding 4
    BinOracle { policy: BinHeuristic::WorstFit, capacity: 10, items: &[5, 2, 6, 3, 4], bins: &[0, 0, 1, 1, 2], bins_used: 3, lower_bound: 2 },
    BinOracle { policy: BinHeuristic::WorstFit, capacity: 10, items: &[7, 6, 8, 1, 1], bins: &[0, 1, 2, 1, 0], bins_used: 3, lower_bound: 3 },
    // 3 goes to the second-emptiest bin (3 left)
    BinOracle { policy: BinHeuristic::AlmostWorstFit, capacity: 10, items: &[5, 2, 6, 3, 4], bins: &[0, 0, 1, 0, 1], bins_used: 2, lower_bound: 2 },
    // remaining 3,4,2: second-emptiest is bin 0; then 2,4,2 ties resolve to bin 0
    BinOracle { policy: BinHeuristic::AlmostWorstFit, capacity: 10, items: &[7, 6, 8, 1, 1], bins: &[0, 1, 2, 0, 0], bins_used: 3, lower_bound: 3 },
    // classes of 7,5,4,3,5,3 at capacity 12 with k=4: 1,2,3,4,2,4
    BinOracle { policy: BinHeuristic::HarmonicK, capacity: 12, items: &[7, 5, 4, 3, 5, 3], bins: &[0, 1, 2, 3, 1, 3], bins_used: 4, lower_bound: 3 },
    // six B2 pieces: two per class-3 bin, the sixth diverted to a new class-1 bin
    BinOracle { policy: BinHeuristic::RefinedFirstFit, capacity: 100, items: &[35, 35, 35, 35, 35, 34], bins: &[0, 0, 1, 1, 2, 3], bins_used: 4, lower_bound: 3 },
    // A, B1, X, B2 open one bin each; 30 joins the X bin, 40 the B2 bin
    BinOracle { policy: BinHeuristic::RefinedFirstFit, capacity: 100, items: &[60, 45, 20, 35, 30, 40], bins: &[0, 1, 2, 3, 2, 3], bins_used: 4, lower_bound: 3 },
];

pub fn run_cache_oracle(o: &CacheOracle) -> Result<(), String> {
    let keys: Vec<&str> = o.trace.split(' ').collect();
    let trace = Trace::from_keys("oracle", &keys);
    let mut p = make_baseline_policy(o.policy, &PolicyParams::default()).map_err(|e| e.to_string())?;
    let mut resident = BTreeSet::new();
    let m = simulate_observed(&trace, o.capacity, &mut p, |_, s| {
        resident = s.cache.keys().cloned().collect();
    })
    .map_err(|e| e.to_string())?;
    let want: BTreeSet<String> = o.resident.iter().map(|s| s.to_string()).collect();
    if (m.hits, m.misses, m.accesses) != (o.hits, o.misses, keys.len() as u64) || resident != want {
        return Err(format!(
            "{} on {:?} cap {}: got {}/{} resident {:?}, want {}/{} resident {:?}",
            o.policy, o.trace, o.capacity, m.hits, m.misses, resident, o.hits, o.misses, want
        ));
    }
    Ok(())
}

pub fn run_bin_oracle(o: &BinOracle) -> Result<(), String> {
    let trace = BinTrace::new("oracle", o.capacity, o.items.to_vec()).map_err(|e| e.to_string())?;
    let mut p = make_bin_heuristic(o.policy, &PolicyParams::default()).map_err(|e| e.to_string())?;
    let mut chosen = Vec::new();
    let m = pack_observed(&trace, &mut p, |_, b, _| chosen.push(b)).map_err(|e| e.to_string())?;
    if chosen != o.bins || m.bins_used != o.bins_used || m.lower_bound != o.lower_bound {
        return Err(format!(
            "{} on {:?}: got bins {:?} ({} used, lb {}), want {:?} ({} used, lb {})",
            o.policy, o.items, chosen, m.bins_used, m.lower_bound, o.bins, o.bins_used, o.lower_bound
        ));
    }
    Ok(())
}

/// Posterior mean of Bayesian linear regression on `[x, sigma0]` with a
/// unit prior and noise variance `noise`, by Gaussian elimination.
pub fn blr_predict(xs: &[Vec<f64>], ys: &[Vec<f64>], sigma0: f64, noise: f64, x: &[f64]) -> Vec<f64> {
    let aug = |v: &[f64]| -> Vec<f64> {
        let mut a = v.to_vec();
        a.push(sigma0);
        a
    };
    let phi: Vec<Vec<f64>> = xs.iter().map(|v| aug(v)).collect();
    let d = phi[0].len();
    let n = ys[0].len();
    // [PhiᵀPhi + noise I | PhiᵀY]
    let mut a = vec![vec![0.0; d + n]; d];
    for (r, row) in a.iter_mut().enumerate() {
        for c in 0..d {
            row[c] = phi.iter().map(|p| p[r] * p[c]).sum::<f64>() + if r == c { noise } else { 0.0 };
        }
        for t in 0..n {
            row[d + t] = phi.iter().zip(ys).map(|(p, y)| p[r] * y[t]).sum();
        }
    }
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in 0..d {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot = a[col].clone();
                for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let q = aug(x);
    (0..n)
        .map(|t| (0..d).map(|r| q[r] * a[r][d + t] / a[r][r]).sum())
        .collect()
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// Runs every cache baseline over `trace` and checks the structural
/// invariants after every request.
pub fn check_cache_invariants(trace: &Trace, capacity: u64) -> Result<(), String> {
    for n in BaselineName::ALL {
        let mut p = make_baseline_policy(n, &PolicyParams::default()).map_err(|e| e.to_string())?;
        let mut violation = None;
        let m = simulate_observed(trace, capacity, &mut p, |i, s| {
            let bytes: u64 = s.cache.values().map(|r| r.size).sum();
            if violation.is_none() && (s.size > capacity || bytes != s.size) {
                violation = Some(format!("{n}: request {i} size {} (sum {bytes}) > capacity {capacity}", s.size));
            }
        })
        .map_err(|e| format!("{n}: {e}"))?;
        if let Some(v) = violation {
            return Err(v);
        }
        if m.accesses != m.hits + m.misses || m.accesses != trace.len() as u64 {
            return Err(format!("{n}: {m:?} inconsistent for {} requests", trace.len()));
        }
    }
    Ok(())
}

pub fn check_bin_invariants(trace: &BinTrace) -> Result<(), String> {
    for h in BinHeuristic::ALL {
        let mut p = make_bin_heuristic(h, &PolicyParams::default()).map_err(|e| e.to_string())?;
        let m = forge_core::binpack::pack(trace, &mut p).map_err(|e| format!("{h}: {e}"))?;
        let l1 = forge_core::binpack::l1_lower_bound(&trace.items, trace.capacity).map_err(|e| e.to_string())?;
        if m.lower_bound != l1 || m.bins_used < l1 || m.bins_used > trace.items.len() as u64 {
            return Err(format!("{h}: bins {} outside [{l1}, {}]", m.bins_used, trace.items.len()));
        }
    }
    Ok(())
}

/// Deterministic random instance `seed` of the fuzz campaign.
pub fn fuzz_case(seed: u64) -> (Trace, u64, BinTrace) {
    use forge_core::trace::Request;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let keys = rng.random_range(1..=12);
    let len = rng.random_range(1..=200);
    let weighted = rng.random_bool(0.5);
    let reqs = (0..len)
        .map(|_| {
            let k: u32 = rng.random_range(0..keys);
            // A key keeps one size across the trace.
            let size = if weighted { u64::from(k % 3) + 1 } else { 1 };
            Request::new(format!("k{k}"), size)
        })
        .collect();
    let capacity = rng.random_range(1..=8);
    let bin_cap = rng.random_range(1..=100);
    let items = (0..rng.random_range(1..=60)).map(|_| rng.random_range(1..=bin_cap)).collect();
    (
        Trace::new(format!("fuzz-{seed}"), reqs),
        capacity,
        BinTrace::new(format!("fuzz-{seed}"), bin_cap, items).expect("items fit"),
    )
}

pub struct GprCase {
    /// Max |model - oracle| over training and query points.
    pub oracle_error: f64,
    /// Max |prediction - target| at training points with noise 1e-8 on
    /// targets the kernel can represent.
    pub interpolation_error: f64,
    pub double_sum_exact: bool,
    pub permutation_exact: bool,
}

/// One fuzzed instance: m ≤ 8 solutions, d ≤ 5 dimensions, n ≤ 4 targets,
/// each feature the sum of up to 4 stimulus embeddings.
pub fn gpr_case(seed: u64) -> GprCase {
    use forge_core::gpr::{kernel, raw_to_f64, Feature, GprModel};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6770 + seed);
    let m = rng.random_range(1..=8);
    let d = rng.random_range(1..=5);
    let n = rng.random_range(1..=4);
    let s = rng.random_range(1..=4);
    let sigma0 = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.1..1.0) };
    let parts: Vec<Vec<Feature>> = (0..m)
        .map(|_| {
            (0..s)
                .map(|_| {
                    let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) * 0.5).collect();
                    Feature::from_f64(&v)
                })
                .collect()
        })
        .collect();
    let features: Vec<Feature> = parts.iter().map(|p| Feature::sum(d, p)).collect();
    let xs: Vec<Vec<f64>> = features.iter().map(Feature::to_f64).collect();
    let ys: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();

    let model = GprModel::fit(&features, &ys, sigma0, 1e-2).expect("fit");
    let mut queries = features.clone();
    queries.extend((0..3).map(|_| {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Feature::from_f64(&v)
    }));
    let mut oracle_error: f64 = 0.0;
    for q in &queries {
        let got = model.predict_raw(q).expect("predict");
        let want = blr_predict(&xs, &ys, sigma0, 1e-2, &q.to_f64());
        for (g, w) in got.iter().zip(&want) {
            oracle_error = oracle_error.max((g - w).abs());
        }
    }

    // Targets of the form x·w + sigma0·b lie in the kernel's span.
    let w: Vec<Vec<f64>> = (0..n).map(|_| (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let realizable: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            w.iter()
                .map(|wt| x.iter().zip(wt).map(|(a, b)| a * b).sum::<f64>() + sigma0 * wt[d])
                .collect()
        })
        .collect();
    let exact = GprModel::fit(&features, &realizable, sigma0, 1e-8).expect("fit");
    let mut interpolation_error: f64 = 0.0;
    for (f, y) in features.iter().zip(&realizable) {
        for (g, t) in exact.predict_raw(f).expect("predict").iter().zip(y) {
            interpolation_error = interpolation_error.max((g - t).abs());
        }
    }

    let mut double_sum_exact = true;
    for (i, pi) in parts.iter().enumerate() {
        for (j, pj) in parts.iter().enumerate() {
            let raw: i128 = pi.iter().flat_map(|a| pj.iter().map(move |b| a.dot_raw(b))).sum();
            let explicit = raw_to_f64(raw) + sigma0 * sigma0;
            double_sum_exact &= kernel(&features[i], &features[j], sigma0).to_bits() == explicit.to_bits();
        }
    }

    // Shuffling each solution's stimuli must change nothing, bit for bit.
    let shuffled: Vec<Feature> = parts
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.shuffle(&mut rng);
            Feature::sum(d, &p)
        })
        .collect();
    let mut permutation_exact = shuffled == features;
    let pm = GprModel::fit(&shuffled, &ys, sigma0, 1e-2).expect("fit");
    for q in &queries {
        let a = model.predict_raw(q).expect("predict");
        let b = pm.predict_raw(q).expect("predict");
        permutation_exact &= a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
        for (f, g) in features.iter().zip(&shuffled) {
            permutation_exact &= kernel(f, q, sigma0).to_bits() == kernel(g, q, sigma0).to_bits();
        }
    }

    GprCase {
        oracle_error,
        interpolation_error,
        double_sum_exact,
        permutation_exact,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Checks that the explore target is the pool point with the largest
/// minimum distance to history, recomputed here from scratch.
pub fn explore_case(seed: u64) -> Result<(), String> {
    use forge_core::feedback::{explore_pool, steering_target, Fraction, FeedbackEmbedding, SteeringMode};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=6);
    let history: Vec<FeedbackEmbedding> = (0..rng.random_range(1..=10))
        .map(|_| FeedbackEmbedding::new("s", (0..n).map(|_| Fraction::new(rng.random_range(0..=20), 20)).collect()))
        .collect();
    let hist: Vec<Vec<f64>> = history.iter().map(FeedbackEmbedding::to_f64).collect();
    let pool_seed: u64 = rng.random();
    let pool = explore_pool(&history, 256, &mut rand_chacha::ChaCha8Rng::seed_from_u64(pool_seed)).map_err(|e| e.to_string())?;
    let min_d = |p: &[f64]| hist.iter().map(|h| dist(p, h)).fold(f64::INFINITY, f64::min);
    let best = min_d(&pool.points[pool.best]);
    if let Some((i, p)) = pool.points.iter().enumerate().find(|(_, p)| min_d(p) > best) {
        return Err(format!("seed {seed}: point {i} has min distance {} > chosen {best}", min_d(p)));
    }
    let t = steering_target(SteeringMode::Explore, &history, n, 256, &mut rand_chacha::ChaCha8Rng::seed_from_u64(pool_seed))
        .map_err(|e| e.to_string())?;
    if t.0 != pool.points[pool.best] {
        return Err(format!("seed {seed}: target is not the pool's best point"));
    }
    let e = steering_target(SteeringMode::Exploit, &history, n, 256, &mut rng).map_err(|e| e.to_string())?;
    if e.0 != vec![1.0; n] {
        return Err(format!("seed {seed}: exploit target {:?}", e.0));
    }
    Ok(())
}

/// Runs `trials` power-of-two selections against independently recomputed
/// predictions; returns the number of times the farther candidate won.
pub fn power_of_two_violations(trials: u64) -> u64 {
    use forge_core::gpr::GprModel;
    use forge_core::stimuli::{default_pool, feature_of, rsdict_select, rsdict_sf_select, CachedEmbedding, MockEmbedding};
    use rand::{Rng, SeedableRng};
    let pool = default_pool();
    let embed = CachedEmbedding::in_memory(MockEmbedding::new(3));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let n = 5;
    let train: Vec<Vec<String>> = (0..12).map(|_| rsdict_select(&pool, 4, &mut rng).unwrap()).collect();
    let feats: Vec<_> = train.iter().map(|k| feature_of(k, &embed).unwrap()).collect();
    let ys: Vec<Vec<f64>> = (0..12).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
    let model = GprModel::fit(&feats, &ys, 0.0, 1e-2).unwrap();
    let mut violations = 0;
    for _ in 0..trials {
        let target: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let sel = rsdict_sf_select(&pool, 4, &model, &target, 2, &embed, &mut rng).unwrap();
        let d: Vec<f64> = sel
            .candidates
            .iter()
            .map(|c| dist(&model.predict(&feature_of(&c.keywords, &embed).unwrap()).unwrap(), &target))
            .collect();
        let chosen = d[sel.chosen_index];
        if d.iter().any(|&x| x < chosen) || sel.chosen.keywords != sel.candidates[sel.chosen_index].keywords {
            violations += 1;
        }
    }
    violations
}

/// Share of rank-1 requests in a 10^5-request Zipf(1000, 1) trace.
pub fn zipf_rank1_share() -> f64 {
    let t = forge_core::trace::gen_zipf(1000, 100_000, 1.0, 2024).unwrap();
    let top = t.requests.iter().filter(|r| r.key == "obj_0001").count();
    top as f64 / t.len() as f64
}

/// The frozen replay campaign: cache problem, stimulus-and-feedback
/// steering, six solutions after two warm-up iterations.
pub fn replay_config(out_dir: &std::path::Path) -> forge_core::orchestrator::CampaignConfig {
    use forge_core::orchestrator::{CampaignConfig, Clock, LlmConfig};
    CampaignConfig {
        iterations: 6,
        warmup: 2,
        clock: Clock::Logical,
        llm: LlmConfig::Replay {
            dir: fixtures_dir().join("replay"),
        },
        out_dir: out_dir.to_path_buf(),
        ..CampaignConfig::default()
    }
}

pub fn golden_path() -> PathBuf {
    fixtures_dir().join("golden").join("solutions.jsonl")
}

/// Runs the replay campaign in a scratch directory and returns the bytes
/// of its store plus its iteration log.
pub fn replay_campaign() -> (Vec<u8>, Vec<forge_core::orchestrator::IterationLog>) {
    use forge_core::orchestrator::{read_iteration_log, run_campaign, ITERATIONS_FILE, SOLUTIONS_FILE};
    let dir = tempfile::tempdir().unwrap();
    run_campaign(&replay_config(dir.path())).expect("replay campaign");
    let bytes = std::fs::read(dir.path().join(SOLUTIONS_FILE)).unwrap();
    let log = read_iteration_log(&dir.path().join(ITERATIONS_FILE)).unwrap();
    (bytes, log)
}

/// One-line description of the first mismatch between two byte strings.
pub fn first_difference(got: &[u8], want: &[u8]) -> Option<String> {
    if got == want {
        return None;
    }
    let g = String::from_utf8_lossy(got);
    let w = String::from_utf8_lossy(want);
    for (i, (a, b)) in g.lines().zip(w.lines()).enumerate() {
        if a != b {
            return Some(format!("line {} differs", i + 1));
        }
    }
    Some(format!("{} lines vs {} golden lines", g.lines().count(), w.lines().count()))
}

/// Protocol constants a short mock campaign on default settings logs.
pub fn default_protocol_logs() -> Vec<forge_core::orchestrator::IterationLog> {
    use forge_core::ideation::Strategy;
    use forge_core::orchestrator::{read_iteration_log, run_campaign, CampaignConfig, ITERATIONS_FILE};
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig {
        strategy: Strategy::Rsdict,
        iterations: 2,
        out_dir: dir.path().to_path_buf(),
        ..CampaignConfig::default()
    };
    run_campaign(&cfg).expect("mock campaign");
    read_iteration_log(&dir.path().join(ITERATIONS_FILE)).unwrap()
}
