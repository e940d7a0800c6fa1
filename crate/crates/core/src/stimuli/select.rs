use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{feature_of, EmbeddingProvider, KeywordPool, StimuliError};
use crate::feedback::l2;
use crate::gpr::{Feature, GprModel};

/// `s` distinct keywords plus the sum of their embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusSet {
    pub keywords: Vec<String>,
    pub feature: Feature,
}

impl StimulusSet {
    pub fn new(keywords: Vec<String>, provider: &dyn EmbeddingProvider) -> Result<Self, StimuliError> {
        let feature = feature_of(&keywords, provider)?;
        Ok(Self { keywords, feature })
    }
}

/// Uniform sample of `s` keywords without replacement.
pub fn rsdict_select<R: Rng + ?Sized>(
    pool: &KeywordPool,
    s: usize,
    rng: &mut R,
) -> Result<Vec<String>, StimuliError> {
    if s == 0 {
        return Err(StimuliError::NoKeywords);
    }
    if s > pool.len() {
        return Err(StimuliError::TooFew { s, pool: pool.len() });
    }
    Ok(sample(rng, pool.len(), s)
        .into_iter()
        .map(|i| pool.keywords()[i].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLog {
    pub keywords: Vec<String>,
    pub prediction: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfSelection {
    pub chosen: StimulusSet,
    pub chosen_index: usize,
    pub candidates: Vec<CandidateLog>,
}

/// Draws `candidates` stimulus sets and keeps the one whose predicted
/// feedback lies closest to `target`. Ties go to the earliest draw; a
/// draw identical to an earlier one is redrawn once.
#[allow(clippy::too_many_arguments)]
pub fn rsdict_sf_select<R: Rng + ?Sized>(
    pool: &KeywordPool,
    s: usize,
    model: &GprModel,
    target: &[f64],
    candidates: usize,
    provider: &dyn EmbeddingProvider,
    rng: &mut R,
) -> Result<SfSelection, StimuliError> {
    if candidates < 2 {
        return Err(StimuliError::TooFewCandidates(candidates));
    }
    if target.len() != model.n_targets() {
        return Err(crate::gpr::GprError::DimensionMismatch {
            expected: model.n_targets(),
            got: target.len(),
        }
        .into());
    }
    let mut seen: Vec<BTreeSet<String>> = Vec::new();
    let mut sets = Vec::with_capacity(candidates);
    let mut log = Vec::with_capacity(candidates);
    for _ in 0..candidates {
        let mut kws = rsdict_select(pool, s, rng)?;
        if seen.contains(&kws.iter().cloned().collect()) {
            kws = rsdict_select(pool, s, rng)?;
        }
        seen.push(kws.iter().cloned().collect());
        let set = StimulusSet::new(kws, provider)?;
        let prediction = model.predict(&set.feature)?;
        let distance = l2(&prediction, target);
        log.push(CandidateLog {
            keywords: set.keywords.clone(),
            prediction,
            distance,
        });
        sets.push(set);
    }
    let mut best = 0;
    for (i, c) in log.iter().enumerate() {
        if c.distance < log[best].distance {
            best = i;
        }
    }
    Ok(SfSelection {
        chosen: sets.swap_remove(best),
        chosen_index: best,
        candidates: log,
    })
}
