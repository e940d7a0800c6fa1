//! Synthetic workload traces: keyed cache requests and bin-packing item streams.

mod gen;
mod io;
pub mod suite;

pub use gen::{gen_bin_items, gen_zipf, harmonic_number, ItemDistribution};
pub use io::{read_bin_trace, read_cache_trace, write_bin_trace, write_cache_trace, TraceFile};
pub use suite::{Suite, SuiteKind, SuiteSpec, SuiteTraces};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One cache access.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Request {
    pub key: String,
    pub size: u64,
}

impl Request {
    pub fn new(key: impl Into<String>, size: u64) -> Self {
        Self {
            key: key.into(),
            size,
        }
    }

    /// Unit-size request, the shape every synthetic trace uses.
    pub fn unit(key: impl Into<String>) -> Self {
        Self::new(key, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub id: String,
    pub requests: Vec<Request>,
}

impl Trace {
    pub fn new(id: impl Into<String>, requests: Vec<Request>) -> Self {
        Self {
            id: id.into(),
            requests,
        }
    }

    /// Builds a unit-size trace from a whitespace- or comma-free key list, e.g. `["a","b","a"]`.
    pub fn from_keys<S: AsRef<str>>(id: impl Into<String>, keys: &[S]) -> Self {
        Self::new(
            id,
            keys.iter().map(|k| Request::unit(k.as_ref())).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn distinct_keys(&self) -> usize {
        let mut seen = std::collections::HashSet::with_capacity(self.requests.len() / 4 + 1);
        for r in &self.requests {
            seen.insert(r.key.as_str());
        }
        seen.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinTrace {
    pub id: String,
    pub capacity: u64,
    pub items: Vec<u64>,
}

impl BinTrace {
    /// Validates `1 <= item <= capacity` for every item.
    pub fn new(id: impl Into<String>, capacity: u64, items: Vec<u64>) -> Result<Self, TraceError> {
        if capacity == 0 {
            return Err(TraceError::InvalidParameter("bin capacity must be >= 1".into()));
        }
        if let Some((i, bad)) = items
            .iter()
            .enumerate()
            .find(|(_, &x)| x == 0 || x > capacity)
        {
            return Err(TraceError::InvalidParameter(format!(
                "item {i} has size {bad}, outside [1, {capacity}]"
            )));
        }
        Ok(Self {
            id: id.into(),
            capacity,
            items,
        })
    }
}
