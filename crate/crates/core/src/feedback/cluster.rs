use serde::{Deserialize, Serialize};

use super::{euclidean, AnalyticsError, FeedbackEmbedding};

/// Named reference embeddings (one per baseline heuristic), in declared order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidSet {
    pub suite_id: String,
    pub centroids: Vec<(String, FeedbackEmbedding)>,
}

impl CentroidSet {
    pub fn new(suite_id: impl Into<String>) -> Self {
        Self {
            suite_id: suite_id.into(),
            centroids: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, embedding: FeedbackEmbedding) {
        self.centroids.push((name.into(), embedding));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub centroid: String,
    pub members: Vec<String>,
    pub count: usize,
    pub max_distance: f64,
    /// `count / max_distance`; absent when every member sits on the centroid.
    pub density: Option<f64>,
    pub degenerate: bool,
}

/// Assigns every embedding to its nearest centroid (ties to the earlier one).
pub fn cluster(
    embeddings: &[(String, FeedbackEmbedding)],
    centroids: &CentroidSet,
) -> Result<Vec<ClusterReport>, AnalyticsError> {
    if centroids.centroids.is_empty() {
        return Err(AnalyticsError::NoCentroids);
    }
    let mut reports: Vec<ClusterReport> = centroids
        .centroids
        .iter()
        .map(|(name, _)| ClusterReport {
            centroid: name.clone(),
            members: Vec::new(),
            count: 0,
            max_distance: 0.0,
            density: None,
            degenerate: false,
        })
        .collect();

    for (id, e) in embeddings {
        let mut best: Option<(usize, f64)> = None;
        for (ci, (_, c)) in centroids.centroids.iter().enumerate() {
            let d = euclidean(e, c)?;
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((ci, d));
            }
        }
        let (ci, d) = best.expect("non-empty centroids");
        let r = &mut reports[ci];
        r.members.push(id.clone());
        r.count += 1;
        r.max_distance = r.max_distance.max(d);
    }

    for r in &mut reports {
        if r.count > 0 {
            if r.max_distance > 0.0 {
                r.density = Some(r.count as f64 / r.max_distance);
            } else {
                r.degenerate = true;
            }
        }
    }
    Ok(reports)
}
