use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BinPolicy, BinState, Placement};
use crate::cache::{HookError, PolicyError, PolicyParams};

pub const DEFAULT_HARMONIC_K: u32 = 4;
/// Every 6th B2 piece is diverted to class-1 bins in Refined First Fit.
pub const RFF_B2_DIVERT_PERIOD: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinHeuristic {
    NextFit,
    WorstFit,
    AlmostWorstFit,
    FirstFit,
    BestFit,
    HarmonicK,
    RefinedFirstFit,
}

impl BinHeuristic {
    pub const ALL: [BinHeuristic; 7] = [
        BinHeuristic::NextFit,
        BinHeuristic::WorstFit,
        BinHeuristic::AlmostWorstFit,
        BinHeuristic::FirstFit,
        BinHeuristic::BestFit,
        BinHeuristic::HarmonicK,
        BinHeuristic::RefinedFirstFit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BinHeuristic::NextFit => "next_fit",
            BinHeuristic::WorstFit => "worst_fit",
            BinHeuristic::AlmostWorstFit => "almost_worst_fit",
            BinHeuristic::FirstFit => "first_fit",
            BinHeuristic::BestFit => "best_fit",
            BinHeuristic::HarmonicK => "harmonic_k",
            BinHeuristic::RefinedFirstFit => "refined_first_fit",
        }
    }
}

impl fmt::Display for BinHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BinHeuristic {
    type Err = PolicyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BinHeuristic::ALL
            .into_iter()
            .find(|h| h.as_str() == s)
            .ok_or_else(|| PolicyError::UnknownPolicy(s.to_string()))
    }
}

pub fn make_bin_heuristic(
    name: BinHeuristic,
    params: &PolicyParams,
) -> Result<Box<dyn BinPolicy>, PolicyError> {
    let allowed: &[&str] = if name == BinHeuristic::HarmonicK { &["k"] } else { &[] };
    if let Some(k) = params.0.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(PolicyError::UnknownParameter {
            policy: name.to_string(),
            name: k.clone(),
        });
    }
    Ok(match name {
        BinHeuristic::NextFit => Box::new(NextFit),
        BinHeuristic::WorstFit => Box::new(WorstFit),
        BinHeuristic::AlmostWorstFit => Box::new(AlmostWorstFit),
        BinHeuristic::FirstFit => Box::new(FirstFit),
        BinHeuristic::BestFit => Box::new(BestFit),
        BinHeuristic::HarmonicK => {
            let k = params.0.get("k").copied().unwrap_or(f64::from(DEFAULT_HARMONIC_K));
            if k < 2.0 || k.fract() != 0.0 {
                return Err(PolicyError::InvalidParameter {
                    policy: name.to_string(),
                    name: "k".into(),
                    value: k,
                    reason: "must be an integer >= 2",
                });
            }
            Box::new(Harmonic::new(k as u32))
        }
        BinHeuristic::RefinedFirstFit => Box::new(RefinedFirstFit::default()),
    })
}

fn feasible(item: u64, state: &BinState) -> impl Iterator<Item = (usize, u64)> + '_ {
    state
        .bins
        .iter()
        .copied()
        .enumerate()
        .filter(move |&(_, r)| r >= item)
}

struct NextFit;
impl BinPolicy for NextFit {
    fn name(&self) -> &str {
        "next_fit"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        Ok(s.bins.last().filter(|&&r| r >= item).map(|_| s.bins.len() - 1))
    }
}

struct FirstFit;
impl BinPolicy for FirstFit {
    fn name(&self) -> &str {
        "first_fit"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        Ok(feasible(item, s).next().map(|(i, _)| i))
    }
}

/// Tightest fit; ties go to the lowest index.
struct BestFit;
impl BinPolicy for BestFit {
    fn name(&self) -> &str {
        "best_fit"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        Ok(feasible(item, s).min_by_key(|&(i, r)| (r, i)).map(|(i, _)| i))
    }
}

/// Emptiest feasible bin; ties go to the lowest index.
struct WorstFit;
impl BinPolicy for WorstFit {
    fn name(&self) -> &str {
        "worst_fit"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        Ok(feasible(item, s)
            .min_by_key(|&(i, r)| (std::cmp::Reverse(r), i))
            .map(|(i, _)| i))
    }
}

/// Second-emptiest feasible bin, or the only feasible one.
struct AlmostWorstFit;
impl BinPolicy for AlmostWorstFit {
    fn name(&self) -> &str {
        "almost_worst_fit"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        let mut ranked: Vec<(usize, u64)> = feasible(item, s).collect();
        ranked.sort_by_key(|&(i, r)| (std::cmp::Reverse(r), i));
        Ok(match ranked.len() {
            0 => None,
            1 => Some(ranked[0].0),
            _ => Some(ranked[1].0),
        })
    }
}

/// Harmonic class of `item`: `j` for `item/capacity ∈ (1/(j+1), 1/j]` when
/// `j < k`, and `k` for everything at most `1/k`. Exact integer arithmetic.
pub fn harmonic_class(item: u64, capacity: u64, k: u32) -> u32 {
    (1..k)
        .find(|&j| item * u64::from(j + 1) > capacity)
        .unwrap_or(k)
}

/// Harmonic-k: each class is packed Next-Fit into its own bins.
struct Harmonic {
    k: u32,
    open: Vec<Option<usize>>,
}

impl Harmonic {
    fn new(k: u32) -> Self {
        Self {
            k,
            open: vec![None; k as usize + 1],
        }
    }
}

impl BinPolicy for Harmonic {
    fn name(&self) -> &str {
        "harmonic_k"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        let class = harmonic_class(item, s.capacity, self.k) as usize;
        if let Some(b) = self.open[class] {
            if s.bins.get(b).is_some_and(|&r| r >= item) {
                return Ok(Some(b));
            }
        }
        self.open[class] = Some(s.bins.len());
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RffClass {
    /// (1/2, 1]
    A,
    /// (2/5, 1/2]
    B1,
    /// (1/3, 2/5]
    B2,
    /// (0, 1/3]
    X,
}

impl RffClass {
    pub fn of(item: u64, capacity: u64) -> Self {
        if 2 * item > capacity {
            RffClass::A
        } else if 5 * item > 2 * capacity {
            RffClass::B1
        } else if 3 * item > capacity {
            RffClass::B2
        } else {
            RffClass::X
        }
    }

    fn bin_class(self) -> u8 {
        match self {
            RffClass::A => 1,
            RffClass::B1 => 2,
            RffClass::B2 => 3,
            RffClass::X => 4,
        }
    }
}

/// Yao's Refined First Fit: four bin classes, First Fit within a class, with
/// every sixth B2 piece sent to class-1 bins.
#[derive(Default)]
struct RefinedFirstFit {
    bin_class: Vec<u8>,
    b2_seen: u64,
}

impl BinPolicy for RefinedFirstFit {
    fn name(&self) -> &str {
        "refined_first_fit"
    }
    fn choose_bin(&mut self, item: u64, s: &BinState) -> Result<Placement, HookError> {
        let piece = RffClass::of(item, s.capacity);
        let mut target = piece.bin_class();
        if piece == RffClass::B2 {
            self.b2_seen += 1;
            if self.b2_seen.is_multiple_of(RFF_B2_DIVERT_PERIOD) {
                target = 1;
            }
        }
        let found = feasible(item, s)
            .find(|&(i, _)| self.bin_class.get(i) == Some(&target))
            .map(|(i, _)| i);
        if found.is_none() {
            self.bin_class.resize(s.bins.len(), 0);
            self.bin_class.push(target);
        }
        Ok(found)
    }
}
