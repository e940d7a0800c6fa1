//! Native baseline policies plus the ordered-list helpers they share.

mod arc;
mod clock;
mod fifo;
mod lfu;
mod lru;
mod s3fifo;
mod sieve;
mod slru;
mod tinylfu;

pub use arc::Arc;
pub use clock::Clock;
pub use fifo::Fifo;
pub use lfu::Lfu;
pub use lru::Lru;
pub use s3fifo::S3Fifo;
pub use sieve::Sieve;
pub use slru::Slru;
pub use tinylfu::TinyLfu;

use std::collections::{BTreeMap, HashMap, VecDeque};

/// Recency-ordered set of keys with byte accounting. O(log n) operations.
#[derive(Debug, Default, Clone)]
pub(crate) struct LruList {
    tick: u64,
    entries: HashMap<String, (u64, u64)>,
    order: BTreeMap<u64, String>,
    bytes: u64,
}

impl LruList {
    pub fn bytes(&self) -> u64 {
        self.bytes
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Inserts at the MRU end, or moves an existing key there.
    pub fn insert_mru(&mut self, key: &str, size: u64) {
        self.tick += 1;
        if let Some((stamp, old_size)) = self.entries.get_mut(key) {
            self.order.remove(stamp);
            *stamp = self.tick;
            self.bytes = self.bytes - *old_size + size;
            *old_size = size;
        } else {
            self.entries.insert(key.to_string(), (self.tick, size));
            self.bytes += size;
        }
        self.order.insert(self.tick, key.to_string());
    }

    pub fn touch(&mut self, key: &str) -> bool {
        match self.entries.get(key) {
            Some(&(_, size)) => {
                self.insert_mru(key, size);
                true
            }
            None => false,
        }
    }

    pub fn remove(&mut self, key: &str) -> Option<u64> {
        let (stamp, size) = self.entries.remove(key)?;
        self.order.remove(&stamp);
        self.bytes -= size;
        Some(size)
    }

    pub fn lru(&self) -> Option<&str> {
        self.order.values().next().map(String::as_str)
    }

    pub fn pop_lru(&mut self) -> Option<(String, u64)> {
        let key = self.lru()?.to_string();
        let size = self.remove(&key)?;
        Some((key, size))
    }
}

/// FIFO of evicted keys (no payload), bounded by the caller.
#[derive(Debug, Default, Clone)]
pub(crate) struct GhostList {
    seq: u64,
    members: HashMap<String, (u64, u64)>,
    queue: VecDeque<(u64, String)>,
    bytes: u64,
}

impl GhostList {
    pub fn contains(&self, key: &str) -> bool {
        self.members.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn bytes(&self) -> u64 {
        self.bytes
    }

    pub fn push(&mut self, key: &str, size: u64) {
        self.remove(key);
        self.seq += 1;
        self.members.insert(key.to_string(), (self.seq, size));
        self.queue.push_back((self.seq, key.to_string()));
        self.bytes += size;
    }

    pub fn remove(&mut self, key: &str) -> bool {
        match self.members.remove(key) {
            Some((_, size)) => {
                self.bytes -= size;
                if self.queue.len() > 4 * self.members.len() + 64 {
                    let members = &self.members;
                    self.queue
                        .retain(|(s, k)| members.get(k).is_some_and(|(m, _)| m == s));
                }
                true
            }
            None => false,
        }
    }

    /// Drops the oldest live entry.
    pub fn pop_oldest(&mut self) -> Option<String> {
        while let Some((seq, key)) = self.queue.pop_front() {
            if self.members.get(&key).is_some_and(|(s, _)| *s == seq) {
                let (_, size) = self.members.remove(&key).unwrap();
                self.bytes -= size;
                return Some(key);
            }
        }
        None
    }
}

/// FNV-1a with a seed folded in, finished with a splitmix64 round.
/// Stable across platforms and toolchains, unlike `DefaultHasher`.
pub(crate) fn stable_hash(key: &str, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}
