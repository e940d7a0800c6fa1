//! Feedback embeddings and the analytics built on them: distances,
//! distinctness, heuristic-centroid clusters, steering targets, ranking.

mod cluster;
mod steering;

pub use cluster::{cluster, CentroidSet, ClusterReport};
pub use steering::{explore_pool, steering_target, ExplorePool, SteeringMode, Target, DEFAULT_EXPLORE_CANDIDATES};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("suite mismatch: {0:?} vs {1:?}")]
    SuiteMismatch(String, String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty centroid set")]
    NoCentroids,
    #[error("explore target needs at least one prior embedding")]
    EmptyHistory,
    #[error("solution {0} has not been evaluated")]
    Unevaluated(String),
}

/// Exact non-negative fraction, serialized as `"num/den"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction(pub Ratio<u64>);

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "fraction denominator must be positive");
        Fraction(Ratio::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Fraction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').ok_or_else(|| format!("expected num/den, got {s:?}"))?;
        let n: u64 = n.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
        let d: u64 = d.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
        if d == 0 {
            return Err(format!("{s:?}: zero denominator"));
        }
        Ok(Fraction::new(n, d))
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-trace performance vector of one solution on one suite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeedbackEmbedding {
    pub suite_id: String,
    pub values: Vec<Fraction>,
}

impl FeedbackEmbedding {
    pub fn new(suite_id: impl Into<String>, values: Vec<Fraction>) -> Self {
        Self {
            suite_id: suite_id.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.to_f64().iter().sum::<f64>() / self.values.len() as f64
    }
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn euclidean(a: &FeedbackEmbedding, b: &FeedbackEmbedding) -> Result<f64, AnalyticsError> {
    if a.suite_id != b.suite_id {
        return Err(AnalyticsError::SuiteMismatch(a.suite_id.clone(), b.suite_id.clone()));
    }
    if a.len() != b.len() {
        return Err(AnalyticsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(l2(&a.to_f64(), &b.to_f64()))
}

/// Number of equivalence classes under exact value equality.
pub fn distinct_count<'a, I>(embeddings: I) -> usize
where
    I: IntoIterator<Item = &'a FeedbackEmbedding>,
{
    embeddings
        .into_iter()
        .map(|e| &e.values)
        .collect::<HashSet<_>>()
        .len()
}

/// Ranks `(id, score)` ascending by score, ties by id, truncated to `k`.
/// A `None` score means the solution was never evaluated.
pub fn select_top(
    solutions: &[(String, Option<f64>)],
    k: usize,
) -> Result<Vec<(String, f64)>, AnalyticsError> {
    let mut ranked = solutions
        .iter()
        .map(|(id, s)| {
            s.map(|s| (id.clone(), s))
                .ok_or_else(|| AnalyticsError::Unevaluated(id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(vals: &[(u64, u64)]) -> FeedbackEmbedding {
        FeedbackEmbedding::new("s", vals.iter().map(|&(n, d)| Fraction::new(n, d)).collect())
    }

    #[test]
    fn euclidean_three_four_five() {
        let a = emb(&[(0, 1), (0, 1)]);
        let b = emb(&[(3, 5), (4, 5)]);
        assert!((euclidean(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(euclidean(&a, &a).unwrap(), 0.0);
        let mut c = b.clone();
        c.suite_id = "other".into();
        assert!(matches!(euclidean(&a, &c), Err(AnalyticsError::SuiteMismatch(..))));
    }

    #[test]
    fn fractions_compare_exactly() {
        assert_eq!(Fraction::new(5, 10), Fraction::new(1, 2));
        assert_eq!("6/12".parse::<Fraction>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<Fraction>().is_err());
    }

    #[test]
    fn distinct_counts() {
        let e = emb(&[(1, 2)]);
        let f = emb(&[(1, 3)]);
        assert_eq!(distinct_count([&e, &e, &f]), 2);
        assert_eq!(distinct_count([&f, &e, &e]), 2);
        let many = vec![e.clone(); 350];
        assert_eq!(distinct_count(&many), 1);
    }

    #[test]
    fn top_ranking() {
        let s = vec![
            ("b".to_string(), Some(0.4)),
            ("a".to_string(), Some(0.5)),
            ("c".to_string(), Some(0.3)),
        ];
        assert_eq!(select_top(&s, 1).unwrap(), vec![("c".to_string(), 0.3)]);
        assert_eq!(select_top(&s, 10).unwrap().len(), 3);
        let tied = vec![("z".to_string(), Some(0.1)), ("y".to_string(), Some(0.1))];
        let r = select_top(&tied, 2).unwrap();
        assert_eq!(r[0].0, "y");
        let bad = vec![("q".to_string(), None)];
        assert!(matches!(select_top(&bad, 1), Err(AnalyticsError::Unevaluated(_))));
    }
}
