use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::policies::{Arc, Clock, Fifo, Lfu, Lru, S3Fifo, Sieve, Slru, TinyLfu};
use super::CachePolicy;

/// The nine human-designed cache replacement baselines, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineName {
    Lru,
    Lfu,
    Fifo,
    Clock,
    Sieve,
    S3fifo,
    Tinylfu,
    Slru,
    Arc,
}

impl BaselineName {
    pub const ALL: [BaselineName; 9] = [
        BaselineName::Lru,
        BaselineName::Lfu,
        BaselineName::Fifo,
        BaselineName::Clock,
        BaselineName::Sieve,
        BaselineName::S3fifo,
        BaselineName::Tinylfu,
        BaselineName::Slru,
        BaselineName::Arc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineName::Lru => "lru",
            BaselineName::Lfu => "lfu",
            BaselineName::Fifo => "fifo",
            BaselineName::Clock => "clock",
            BaselineName::Sieve => "sieve",
            BaselineName::S3fifo => "s3fifo",
            BaselineName::Tinylfu => "tinylfu",
            BaselineName::Slru => "slru",
            BaselineName::Arc => "arc",
        }
    }

    /// Parameter names this policy accepts, with defaults.
    pub fn default_params(self) -> &'static [(&'static str, f64)] {
        match self {
            BaselineName::Slru => &[("probation", 0.2)],
            BaselineName::S3fifo => &[("small", 0.1), ("ghost", 1.0), ("promote", 1.0)],
            BaselineName::Tinylfu => &[("window", 0.01), ("width", 4.0), ("sample", 10.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for BaselineName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("unknown policy {0:?}")]
    UnknownPolicy(String),
    #[error("policy {policy}: unknown parameter {name:?}")]
    UnknownParameter { policy: String, name: String },
    #[error("policy {policy}: parameter {name}={value} is invalid ({reason})")]
    InvalidParameter {
        policy: String,
        name: String,
        value: f64,
        reason: &'static str,
    },
    #[error("malformed parameter {0:?}, expected name=value")]
    Malformed(String),
}

impl FromStr for BaselineName {
    type Err = PolicyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaselineName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| PolicyError::UnknownPolicy(s.to_string()))
    }
}

/// Named numeric policy parameters, e.g. `probation=0.3`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams(pub BTreeMap<String, f64>);

impl PolicyParams {
    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    /// Parses whitespace-separated `name=value` pairs.
    pub fn parse(text: &str) -> Result<Self, PolicyError> {
        let mut out = BTreeMap::new();
        for tok in text.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| PolicyError::Malformed(tok.to_string()))?;
            let v: f64 = v.parse().map_err(|_| PolicyError::Malformed(tok.to_string()))?;
            out.insert(k.to_string(), v);
        }
        Ok(Self(out))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PolicyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

fn resolve(name: BaselineName, params: &PolicyParams) -> Result<BTreeMap<&'static str, f64>, PolicyError> {
    let defaults = name.default_params();
    let mut out: BTreeMap<&'static str, f64> = defaults.iter().copied().collect();
    for (k, &v) in &params.0 {
        let Some(&(key, _)) = defaults.iter().find(|(d, _)| d == k) else {
            return Err(PolicyError::UnknownParameter {
                policy: name.to_string(),
                name: k.clone(),
            });
        };
        if !v.is_finite() {
            return Err(PolicyError::InvalidParameter {
                policy: name.to_string(),
                name: k.clone(),
                value: v,
                reason: "not finite",
            });
        }
        out.insert(key, v);
    }
    Ok(out)
}

fn fraction(name: BaselineName, key: &str, v: f64) -> Result<f64, PolicyError> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(PolicyError::InvalidParameter {
            policy: name.to_string(),
            name: key.to_string(),
            value: v,
            reason: "must lie in (0, 1)",
        })
    }
}

fn at_least(name: BaselineName, key: &str, v: f64, min: f64) -> Result<f64, PolicyError> {
    if v >= min {
        Ok(v)
    } else {
        Err(PolicyError::InvalidParameter {
            policy: name.to_string(),
            name: key.to_string(),
            value: v,
            reason: "below minimum",
        })
    }
}

/// A fresh, state-isolated baseline instance.
pub fn make_baseline_policy(
    name: BaselineName,
    params: &PolicyParams,
) -> Result<Box<dyn CachePolicy>, PolicyError> {
    let p = resolve(name, params)?;
    Ok(match name {
        BaselineName::Lru => Box::new(Lru::default()),
        BaselineName::Lfu => Box::new(Lfu::default()),
        BaselineName::Fifo => Box::new(Fifo::default()),
        BaselineName::Clock => Box::new(Clock::default()),
        BaselineName::Sieve => Box::new(Sieve::default()),
        BaselineName::Arc => Box::new(Arc::default()),
        BaselineName::Slru => Box::new(Slru::new(fraction(name, "probation", p["probation"])?)),
        BaselineName::S3fifo => Box::new(S3Fifo::new(
            fraction(name, "small", p["small"])?,
            at_least(name, "ghost", p["ghost"], 0.0)?,
            at_least(name, "promote", p["promote"], 0.0)?.round().min(3.0) as u8,
        )),
        BaselineName::Tinylfu => Box::new(TinyLfu::new(
            fraction(name, "window", p["window"])?,
            at_least(name, "width", p["width"], 1.0)?.round() as u64,
            at_least(name, "sample", p["sample"], 1.0)?.round() as u64,
        )),
    })
}
