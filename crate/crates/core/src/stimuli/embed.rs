use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::StimuliError;
use crate::gpr::Feature;

pub const MOCK_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error("embedding {text:?}: {message}")]
    Provider { text: String, message: String },
    #[error("embedding cache {path}: {message}")]
    Cache { path: String, message: String },
}

/// Text to unit-norm vector. Must be deterministic for a fixed provider.
pub trait EmbeddingProvider: Send + Sync {
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Box<P> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        (**self).embed(text)
    }
}

fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// Offline provider: a stable hash of (seed, text) seeds 64 standard
/// normals, which are then normalized.
#[derive(Debug, Clone)]
pub struct MockEmbedding {
    seed: u64,
    id: String,
}

impl MockEmbedding {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            id: format!("mock-{seed}-d{MOCK_DIM}"),
        }
    }
}

impl EmbeddingProvider for MockEmbedding {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        MOCK_DIM
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(text.as_bytes());
        let digest = h.finalize();
        let mut rng = ChaCha8Rng::from_seed(digest.into());
        let v = (0..MOCK_DIM).map(|_| StandardNormal.sample(&mut rng)).collect();
        normalize(v).ok_or_else(|| EmbedError::Provider {
            text: text.to_string(),
            message: "degenerate draw".into(),
        })
    }
}

/// OpenAI-compatible `POST {base_url}/embeddings` endpoint.
#[derive(Debug, Clone)]
pub struct HttpEmbedding {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub dim: usize,
    pub timeout: Duration,
    id: String,
}

impl HttpEmbedding {
    pub fn new(base_url: &str, model: &str, api_key: Option<String>, dim: usize) -> Self {
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key,
            dim,
            timeout: Duration::from_secs(60),
            id: format!("http-{model}"),
        }
    }
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f64>,
}

impl EmbeddingProvider for HttpEmbedding {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let fail = |message: String| EmbedError::Provider {
            text: text.to_string(),
            message,
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut req = agent.post(&format!("{}/embeddings", self.base_url));
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let body = serde_json::json!({ "model": self.model, "input": text });
        let mut resp = req.send_json(&body).map_err(|e| fail(e.to_string()))?;
        let parsed: EmbeddingResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| fail(e.to_string()))?;
        let v = parsed
            .data
            .into_iter()
            .next()
            .ok_or_else(|| fail("empty data".into()))?
            .embedding;
        if v.len() != self.dim {
            return Err(fail(format!("expected {} dims, got {}", self.dim, v.len())));
        }
        normalize(v).ok_or_else(|| fail("zero vector".into()))
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    provider: String,
    text: String,
    vector: Vec<f64>,
}

/// Read-through cache in front of a provider, optionally persisted as
/// `embeddings.jsonl`.
pub struct CachedEmbedding<P> {
    inner: P,
    memo: RwLock<HashMap<String, Vec<f64>>>,
    file: Option<(PathBuf, Mutex<File>)>,
}

impl<P: EmbeddingProvider> CachedEmbedding<P> {
    pub fn in_memory(inner: P) -> Self {
        Self {
            inner,
            memo: RwLock::new(HashMap::new()),
            file: None,
        }
    }

    /// Loads entries for this provider from `path` (if present) and appends
    /// new ones to it.
    pub fn open(inner: P, path: &Path) -> Result<Self, EmbedError> {
        let err = |message: String| EmbedError::Cache {
            path: path.display().to_string(),
            message,
        };
        let mut memo = HashMap::new();
        if path.exists() {
            let f = File::open(path).map_err(|e| err(e.to_string()))?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line.map_err(|e| err(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheLine =
                    serde_json::from_str(&line).map_err(|e| err(format!("line {}: {e}", i + 1)))?;
                if rec.provider == inner.id() {
                    memo.insert(rec.text, rec.vector);
                }
            }
        }
        let f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| err(e.to_string()))?;
        Ok(Self {
            inner,
            memo: RwLock::new(memo),
            file: Some((path.to_path_buf(), Mutex::new(f))),
        })
    }

    pub fn cached_len(&self) -> usize {
        self.memo.read().expect("cache lock").len()
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for CachedEmbedding<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        if let Some(v) = self.memo.read().expect("cache lock").get(text) {
            return Ok(v.clone());
        }
        let v = self.inner.embed(text)?;
        let mut memo = self.memo.write().expect("cache lock");
        if let Some(existing) = memo.get(text) {
            return Ok(existing.clone());
        }
        if let Some((path, file)) = &self.file {
            let line = serde_json::to_string(&CacheLine {
                provider: self.inner.id().to_string(),
                text: text.to_string(),
                vector: v.clone(),
            })
            .expect("serializable");
            let mut f = file.lock().expect("cache file lock");
            writeln!(f, "{line}").map_err(|e| EmbedError::Cache {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
        memo.insert(text.to_string(), v.clone());
        Ok(v)
    }
}

/// Sum of the keywords' embeddings, in fixed point so the result is
/// independent of keyword order.
pub fn feature_of<S: AsRef<str>>(
    keywords: &[S],
    provider: &dyn EmbeddingProvider,
) -> Result<Feature, StimuliError> {
    if keywords.is_empty() {
        return Err(StimuliError::NoKeywords);
    }
    let mut out = Feature::zeros(provider.dim());
    for k in keywords {
        let e = provider.embed(k.as_ref())?;
        out.add_assign(&Feature::from_f64(&e));
    }
    Ok(out)
}
