//! Trace-driven cache simulation.
//!
//! A policy is a set of four hooks. The simulator owns the authoritative
//! cache contents and decides hits itself; a policy only names victims.

mod baseline;
pub mod policies;

pub use baseline::{make_baseline_policy, BaselineName, PolicyError, PolicyParams};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::trace::{Request, Trace};

/// Read-only view of the cache handed to every hook.
///
/// Counters are bumped before any hook runs, so `access_count` includes the
/// current request and can be used as a logical clock.
#[derive(Debug, Clone, Default)]
pub struct CacheSnapshot {
    pub cache: IndexMap<String, Request>,
    pub size: u64,
    pub capacity: u64,
    pub access_count: u64,
    pub hit_count: u64,
    pub miss_count: u64,
}

/// Failure raised from inside a policy hook.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct HookError(pub String);

pub type HookResult<T = ()> = Result<T, HookError>;

pub trait CachePolicy: Send {
    fn name(&self) -> &str;

    /// Returns the key of a cached object to evict so that `obj` can fit.
    fn evict(&mut self, snapshot: &CacheSnapshot, obj: &Request) -> HookResult<Option<String>>;

    fn update_after_hit(&mut self, snapshot: &CacheSnapshot, obj: &Request) -> HookResult;

    fn update_after_insert(&mut self, snapshot: &CacheSnapshot, obj: &Request) -> HookResult;

    fn update_after_evict(
        &mut self,
        snapshot: &CacheSnapshot,
        obj: &Request,
        evicted: &Request,
    ) -> HookResult;
}

impl<P: CachePolicy + ?Sized> CachePolicy for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn evict(&mut self, s: &CacheSnapshot, o: &Request) -> HookResult<Option<String>> {
        (**self).evict(s, o)
    }
    fn update_after_hit(&mut self, s: &CacheSnapshot, o: &Request) -> HookResult {
        (**self).update_after_hit(s, o)
    }
    fn update_after_insert(&mut self, s: &CacheSnapshot, o: &Request) -> HookResult {
        (**self).update_after_insert(s, o)
    }
    fn update_after_evict(&mut self, s: &CacheSnapshot, o: &Request, e: &Request) -> HookResult {
        (**self).update_after_evict(s, o, e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CacheMetrics {
    pub hits: u64,
    pub misses: u64,
    pub accesses: u64,
}

impl CacheMetrics {
    pub fn hit_ratio(&self) -> f64 {
        if self.accesses == 0 {
            0.0
        } else {
            self.hits as f64 / self.accesses as f64
        }
    }

    pub fn miss_ratio(&self) -> f64 {
        if self.accesses == 0 {
            0.0
        } else {
            self.misses as f64 / self.accesses as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("capacity must be >= 1")]
    InvalidCapacity,
    #[error("illegal eviction at request {index}: {detail}")]
    IllegalEviction { index: usize, detail: String },
    #[error("policy raised at request {index}: {message}")]
    Runtime { index: usize, message: String },
}

pub fn simulate<P: CachePolicy + ?Sized>(
    trace: &Trace,
    capacity: u64,
    policy: &mut P,
) -> Result<CacheMetrics, SimError> {
    simulate_observed(trace, capacity, policy, |_, _| {})
}

/// Like [`simulate`], calling `observe(index, snapshot)` after every request.
pub fn simulate_observed<P, F>(
    trace: &Trace,
    capacity: u64,
    policy: &mut P,
    mut observe: F,
) -> Result<CacheMetrics, SimError>
where
    P: CachePolicy + ?Sized,
    F: FnMut(usize, &CacheSnapshot),
{
    if capacity == 0 {
        return Err(SimError::InvalidCapacity);
    }
    let mut snap = CacheSnapshot {
        capacity,
        ..Default::default()
    };
    let runtime = |index: usize| move |e: HookError| SimError::Runtime { index, message: e.0 };

    for (index, req) in trace.requests.iter().enumerate() {
        snap.access_count += 1;
        if snap.cache.contains_key(&req.key) {
            snap.hit_count += 1;
            policy.update_after_hit(&snap, req).map_err(runtime(index))?;
        } else {
            snap.miss_count += 1;
            if req.size <= capacity {
                while snap.size + req.size > capacity {
                    let victim = policy.evict(&snap, req).map_err(runtime(index))?;
                    let victim = match victim {
                        Some(k) if !k.is_empty() => k,
                        _ => {
                            return Err(SimError::IllegalEviction {
                                index,
                                detail: "evict returned no key".into(),
                            })
                        }
                    };
                    let evicted = snap.cache.shift_remove(&victim).ok_or_else(|| {
                        SimError::IllegalEviction {
                            index,
                            detail: format!("victim {victim:?} is not in the cache"),
                        }
                    })?;
                    snap.size -= evicted.size;
                    policy
                        .update_after_evict(&snap, req, &evicted)
                        .map_err(runtime(index))?;
                }
                snap.cache.insert(req.key.clone(), req.clone());
                snap.size += req.size;
                policy.update_after_insert(&snap, req).map_err(runtime(index))?;
            }
        }
        observe(index, &snap);
    }
    Ok(CacheMetrics {
        hits: snap.hit_count,
        misses: snap.miss_count,
        accesses: snap.access_count,
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CapacityError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("capacity fraction must be in (0, 1], got {0}")]
    BadFraction(f64),
}

/// `max(1, floor(fraction * distinct_keys))`.
pub fn capacity_for_trace(trace: &Trace, fraction: f64) -> Result<u64, CapacityError> {
    if trace.is_empty() {
        return Err(CapacityError::EmptyTrace);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CapacityError::BadFraction(fraction));
    }
    let distinct = trace.distinct_keys() as f64;
    // Nudge before flooring so 0.1 * 50 lands on 5, not 4.999...
    Ok(((fraction * distinct + 1e-9).floor() as u64).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("baseline has zero misses; reduction is undefined")]
pub struct ZeroBaselineMisses;

/// `(baseline_miss_ratio - candidate_miss_ratio) / baseline_miss_ratio`.
pub fn miss_reduction_vs(
    baseline: &CacheMetrics,
    candidate: &CacheMetrics,
) -> Result<f64, ZeroBaselineMisses> {
    if baseline.misses == 0 {
        return Err(ZeroBaselineMisses);
    }
    let b = baseline.miss_ratio();
    Ok((b - candidate.miss_ratio()) / b)
}
