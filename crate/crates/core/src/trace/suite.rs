//! Named trace suites. A suite is the fixed set of traces a feedback
//! embedding is measured on; every embedding carries its suite id.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    gen_bin_items, gen_zipf, read_bin_trace, read_cache_trace, write_bin_trace,
    write_cache_trace, BinTrace, ItemDistribution, Trace, TraceError,
};

pub const MANIFEST: &str = "suite.json";

pub const FEEDBACK_TRACES: usize = 30;
pub const EVAL_TRACES: usize = 12;
pub const ZIPF_OBJECTS: usize = 1000;
pub const ZIPF_REQUESTS: usize = 20_000;
pub const ZIPF_SKEW_MIN: f64 = 0.5;
pub const ZIPF_SKEW_MAX: f64 = 1.45;
pub const BIN_CAPACITY: u64 = 100;
pub const BIN_ITEMS: usize = 1000;
pub const WEIBULL: ItemDistribution = ItemDistribution::Weibull { shape: 3.0, scale: 45.0 };
pub const GAUSSIAN: ItemDistribution = ItemDistribution::Gaussian { mean: 0.3662, std: 0.1416 };
const EVAL_SEED_BASE: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Cache,
    Bin,
}

/// Where a suite comes from: a built-in generator or a directory written by
/// `forge traces gen`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum SuiteSpec {
    CacheFeedback,
    CacheEval,
    BinFeedback,
    BinEval,
    Dir(PathBuf),
}

impl From<String> for SuiteSpec {
    fn from(s: String) -> Self {
        match s.as_str() {
            "cache-feedback" => SuiteSpec::CacheFeedback,
            "cache-eval" => SuiteSpec::CacheEval,
            "bin-feedback" => SuiteSpec::BinFeedback,
            "bin-eval" => SuiteSpec::BinEval,
            _ => SuiteSpec::Dir(PathBuf::from(s)),
        }
    }
}

impl From<SuiteSpec> for String {
    fn from(s: SuiteSpec) -> Self {
        match s {
            SuiteSpec::CacheFeedback => "cache-feedback".into(),
            SuiteSpec::CacheEval => "cache-eval".into(),
            SuiteSpec::BinFeedback => "bin-feedback".into(),
            SuiteSpec::BinEval => "bin-eval".into(),
            SuiteSpec::Dir(p) => p.display().to_string(),
        }
    }
}

impl std::str::FromStr for SuiteSpec {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(SuiteSpec::from(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuiteTraces {
    Cache(Vec<Trace>),
    Bin(Vec<BinTrace>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub id: String,
    pub traces: SuiteTraces,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    id: String,
    kind: SuiteKind,
    traces: Vec<String>,
}

fn skew_grid(count: usize) -> impl Iterator<Item = f64> {
    let step = if count > 1 {
        (ZIPF_SKEW_MAX - ZIPF_SKEW_MIN) / (count - 1) as f64
    } else {
        0.0
    };
    (0..count).map(move |i| ZIPF_SKEW_MIN + step * i as f64)
}

fn zipf_suite(id: &str, count: usize, seed_base: u64) -> Result<Suite, TraceError> {
    let traces = skew_grid(count)
        .enumerate()
        .map(|(i, skew)| {
            let mut t = gen_zipf(ZIPF_OBJECTS, ZIPF_REQUESTS, skew, seed_base + i as u64 + 1)?;
            t.id = format!("{id}-{:02}", i + 1);
            Ok(t)
        })
        .collect::<Result<_, TraceError>>()?;
    Ok(Suite {
        id: id.to_string(),
        traces: SuiteTraces::Cache(traces),
    })
}

fn bin_suite(id: &str, dists: &[ItemDistribution], seed_base: u64) -> Result<Suite, TraceError> {
    let traces = dists
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut t = gen_bin_items(BIN_ITEMS, d, BIN_CAPACITY, seed_base + i as u64 + 1)?;
            t.id = format!("{id}-{:02}", i + 1);
            Ok(t)
        })
        .collect::<Result<_, TraceError>>()?;
    Ok(Suite {
        id: id.to_string(),
        traces: SuiteTraces::Bin(traces),
    })
}

impl SuiteSpec {
    pub fn load(&self) -> Result<Suite, TraceError> {
        match self {
            SuiteSpec::CacheFeedback => zipf_suite("cache-feedback", FEEDBACK_TRACES, 0),
            SuiteSpec::CacheEval => zipf_suite("cache-eval", EVAL_TRACES, EVAL_SEED_BASE),
            SuiteSpec::BinFeedback => {
                bin_suite("bin-feedback", &[WEIBULL; FEEDBACK_TRACES], 0)
            }
            SuiteSpec::BinEval => {
                let mut d = vec![WEIBULL; EVAL_TRACES / 2];
                d.extend(std::iter::repeat_n(GAUSSIAN, EVAL_TRACES - EVAL_TRACES / 2));
                bin_suite("bin-eval", &d, EVAL_SEED_BASE)
            }
            SuiteSpec::Dir(dir) => Suite::read_dir(dir),
        }
    }
}

impl Suite {
    pub fn kind(&self) -> SuiteKind {
        match self.traces {
            SuiteTraces::Cache(_) => SuiteKind::Cache,
            SuiteTraces::Bin(_) => SuiteKind::Bin,
        }
    }

    pub fn len(&self) -> usize {
        match &self.traces {
            SuiteTraces::Cache(t) => t.len(),
            SuiteTraces::Bin(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn trace_ids(&self) -> Vec<String> {
        match &self.traces {
            SuiteTraces::Cache(t) => t.iter().map(|t| t.id.clone()).collect(),
            SuiteTraces::Bin(t) => t.iter().map(|t| t.id.clone()).collect(),
        }
    }

    pub fn cache_traces(&self) -> Option<&[Trace]> {
        match &self.traces {
            SuiteTraces::Cache(t) => Some(t),
            SuiteTraces::Bin(_) => None,
        }
    }

    pub fn bin_traces(&self) -> Option<&[BinTrace]> {
        match &self.traces {
            SuiteTraces::Bin(t) => Some(t),
            SuiteTraces::Cache(_) => None,
        }
    }

    /// Path of trace `id` inside a suite directory.
    pub fn trace_path(dir: &Path, id: &str) -> PathBuf {
        dir.join(format!("{id}.csv"))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), TraceError> {
        let io = |source| TraceError::Io {
            path: dir.display().to_string(),
            source,
        };
        fs::create_dir_all(dir).map_err(io)?;
        match &self.traces {
            SuiteTraces::Cache(ts) => {
                for t in ts {
                    write_cache_trace(&Self::trace_path(dir, &t.id), t)?;
                }
            }
            SuiteTraces::Bin(ts) => {
                for t in ts {
                    write_bin_trace(&Self::trace_path(dir, &t.id), t)?;
                }
            }
        }
        let manifest = Manifest {
            id: self.id.clone(),
            kind: self.kind(),
            traces: self.trace_ids(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(dir.join(MANIFEST), json + "\n").map_err(io)
    }

    pub fn read_dir(dir: &Path) -> Result<Self, TraceError> {
        let mpath = dir.join(MANIFEST);
        let text = fs::read_to_string(&mpath).map_err(|source| TraceError::Io {
            path: mpath.display().to_string(),
            source,
        })?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| TraceError::Parse {
            path: mpath.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let traces = match manifest.kind {
            SuiteKind::Cache => SuiteTraces::Cache(
                manifest
                    .traces
                    .iter()
                    .map(|id| read_cache_trace(&Self::trace_path(dir, id)))
                    .collect::<Result<_, _>>()?,
            ),
            SuiteKind::Bin => SuiteTraces::Bin(
                manifest
                    .traces
                    .iter()
                    .map(|id| read_bin_trace(&Self::trace_path(dir, id)))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(Suite {
            id: manifest.id,
            traces,
        })
    }
}
