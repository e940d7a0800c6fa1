//! Keyword stimuli: the dictionary, semantic embeddings, and the two
//! selection strategies (uniform sampling and GPR-steered power-of-two).

mod embed;
mod pool;
mod select;

pub use embed::{
    feature_of, CachedEmbedding, EmbedError, EmbeddingProvider, HttpEmbedding, MockEmbedding,
    MOCK_DIM,
};
pub use pool::{default_pool, load_pool, KeywordPool};
pub use select::{rsdict_select, rsdict_sf_select, CandidateLog, SfSelection, StimulusSet};

#[derive(Debug, thiserror::Error)]
pub enum StimuliError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("keyword pool is empty after filtering")]
    EmptyPool,
    #[error("cannot select {s} keywords from a pool of {pool}")]
    TooFew { s: usize, pool: usize },
    #[error("at least one keyword is required")]
    NoKeywords,
    #[error("at least two candidates are required, got {0}")]
    TooFewCandidates(usize),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Gpr(#[from] crate::gpr::GprError),
}
