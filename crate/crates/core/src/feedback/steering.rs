use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{l2, AnalyticsError, FeedbackEmbedding};

pub const DEFAULT_EXPLORE_CANDIDATES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteeringMode {
    Exploit,
    Explore,
}

/// A point in the feedback space that selection steers toward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target(pub Vec<f64>);

/// Sampled candidate points and each one's minimum distance to history.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplorePool {
    pub points: Vec<Vec<f64>>,
    pub min_distances: Vec<f64>,
    pub best: usize,
}

/// `num_candidates` uniform points in `[0,1]^n` plus both corners; `best`
/// maximizes the minimum distance to every history embedding (first wins ties).
pub fn explore_pool<R: Rng + ?Sized>(
    history: &[FeedbackEmbedding],
    num_candidates: usize,
    rng: &mut R,
) -> Result<ExplorePool, AnalyticsError> {
    let first = history.first().ok_or(AnalyticsError::EmptyHistory)?;
    let n = first.len();
    let hist: Vec<Vec<f64>> = history
        .iter()
        .map(|h| {
            if h.len() != n {
                Err(AnalyticsError::LengthMismatch(n, h.len()))
            } else {
                Ok(h.to_f64())
            }
        })
        .collect::<Result<_, _>>()?;

    let mut points = vec![vec![0.0; n], vec![1.0; n]];
    points.extend((0..num_candidates).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()));
    let min_distances: Vec<f64> = points
        .iter()
        .map(|p| hist.iter().map(|h| l2(p, h)).fold(f64::INFINITY, f64::min))
        .collect();
    let mut best = 0;
    for (i, &d) in min_distances.iter().enumerate() {
        if d > min_distances[best] {
            best = i;
        }
    }
    Ok(ExplorePool {
        points,
        min_distances,
        best,
    })
}

/// Exploit aims at the all-ones vector; explore at the sampled point
/// farthest from every embedding seen so far.
pub fn steering_target<R: Rng + ?Sized>(
    mode: SteeringMode,
    history: &[FeedbackEmbedding],
    n: usize,
    num_candidates: usize,
    rng: &mut R,
) -> Result<Target, AnalyticsError> {
    match mode {
        SteeringMode::Exploit => Ok(Target(vec![1.0; n])),
        SteeringMode::Explore => {
            let pool = explore_pool(history, num_candidates, rng)?;
            Ok(Target(pool.points[pool.best].clone()))
        }
    }
}
