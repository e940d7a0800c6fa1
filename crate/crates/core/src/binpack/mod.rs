//! Online bin packing: items arrive one at a time and a policy either names
//! an open bin with room or asks for a new one.

mod heuristics;

pub use heuristics::{
    harmonic_class, make_bin_heuristic, BinHeuristic, RffClass, DEFAULT_HARMONIC_K, RFF_B2_DIVERT_PERIOD,
};

use serde::{Deserialize, Serialize};

use crate::cache::HookError;
use crate::trace::BinTrace;

/// Remaining capacity of every open bin, in opening order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinState {
    pub bins: Vec<u64>,
    pub capacity: u64,
}

/// `None` opens a new bin.
pub type Placement = Option<usize>;

pub trait BinPolicy: Send {
    fn name(&self) -> &str;
    fn choose_bin(&mut self, item: u64, state: &BinState) -> Result<Placement, HookError>;
}

impl<P: BinPolicy + ?Sized> BinPolicy for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn choose_bin(&mut self, item: u64, state: &BinState) -> Result<Placement, HookError> {
        (**self).choose_bin(item, state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PackMetrics {
    pub bins_used: u64,
    pub lower_bound: u64,
}

impl PackMetrics {
    /// `lower_bound / bins_used`, in (0, 1].
    pub fn score(&self) -> f64 {
        self.lower_bound as f64 / self.bins_used as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PackError {
    #[error("empty item list")]
    Empty,
    #[error("illegal placement at item {index}: {detail}")]
    IllegalPlacement { index: usize, detail: String },
    #[error("policy raised at item {index}: {message}")]
    Runtime { index: usize, message: String },
}

/// `ceil(sum(items) / capacity)`.
pub fn l1_lower_bound(items: &[u64], capacity: u64) -> Result<u64, PackError> {
    if items.is_empty() {
        return Err(PackError::Empty);
    }
    let total: u64 = items.iter().sum();
    Ok(total.div_ceil(capacity).max(1))
}

pub fn pack<P: BinPolicy + ?Sized>(trace: &BinTrace, policy: &mut P) -> Result<PackMetrics, PackError> {
    pack_observed(trace, policy, |_, _, _| {})
}

/// Like [`pack`], calling `observe(index, chosen_bin, state)` after each placement.
pub fn pack_observed<P, F>(trace: &BinTrace, policy: &mut P, mut observe: F) -> Result<PackMetrics, PackError>
where
    P: BinPolicy + ?Sized,
    F: FnMut(usize, usize, &BinState),
{
    let lower_bound = l1_lower_bound(&trace.items, trace.capacity)?;
    let mut state = BinState {
        bins: Vec::new(),
        capacity: trace.capacity,
    };
    for (index, &item) in trace.items.iter().enumerate() {
        let choice = policy
            .choose_bin(item, &state)
            .map_err(|e| PackError::Runtime { index, message: e.0 })?;
        let bin = match choice {
            None => {
                state.bins.push(trace.capacity);
                state.bins.len() - 1
            }
            Some(i) if i >= state.bins.len() => {
                return Err(PackError::IllegalPlacement {
                    index,
                    detail: format!("bin {i} does not exist ({} open)", state.bins.len()),
                })
            }
            Some(i) if state.bins[i] < item => {
                return Err(PackError::IllegalPlacement {
                    index,
                    detail: format!("bin {i} has {} left, item needs {item}", state.bins[i]),
                })
            }
            Some(i) => i,
        };
        state.bins[bin] -= item;
        observe(index, bin, &state);
    }
    Ok(PackMetrics {
        bins_used: state.bins.len() as u64,
        lower_bound,
    })
}

/// `(baseline.bins_used - candidate.bins_used) / baseline.bins_used`.
pub fn usage_reduction_vs(baseline: &PackMetrics, candidate: &PackMetrics) -> f64 {
    (baseline.bins_used as f64 - candidate.bins_used as f64) / baseline.bins_used as f64
}
