use super::{GhostList, LruList};
use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

/// Adaptive Replacement Cache, byte-weighted. `t1`/`t2` hold resident
/// objects seen once / at least twice; `b1`/`b2` are their ghost lists.
#[derive(Debug, Default)]
pub struct Arc {
    t1: LruList,
    t2: LruList,
    b1: GhostList,
    b2: GhostList,
    /// Target size of `t1` in bytes.
    p: f64,
    adapted_at: Option<u64>,
}

impl Arc {
    fn adapt(&mut self, snap: &CacheSnapshot, obj: &Request) {
        if self.adapted_at == Some(snap.access_count) {
            return;
        }
        self.adapted_at = Some(snap.access_count);
        let c = snap.capacity as f64;
        let size = obj.size as f64;
        let (b1, b2) = (self.b1.bytes() as f64, self.b2.bytes() as f64);
        if self.b1.contains(&obj.key) {
            let delta = if b1 >= b2 { 1.0 } else { b2 / b1 };
            self.p = (self.p + delta * size).min(c);
        } else if self.b2.contains(&obj.key) {
            let delta = if b2 >= b1 { 1.0 } else { b1 / b2 };
            self.p = (self.p - delta * size).max(0.0);
        }
    }

    fn trim_ghosts(&mut self, capacity: u64) {
        while self.t1.bytes() + self.b1.bytes() > capacity && self.b1.len() > 0 {
            self.b1.pop_oldest();
        }
        while self.t1.bytes() + self.t2.bytes() + self.b1.bytes() + self.b2.bytes() > 2 * capacity
        {
            if self.b2.len() > 0 {
                self.b2.pop_oldest();
            } else if self.b1.len() > 0 {
                self.b1.pop_oldest();
            } else {
                break;
            }
        }
    }
}

impl CachePolicy for Arc {
    fn name(&self) -> &str {
        "arc"
    }

    fn evict(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult<Option<String>> {
        self.adapt(snap, obj);
        let t1 = self.t1.bytes() as f64;
        let from_t1 = !self.t1.is_empty()
            && ((self.b2.contains(&obj.key) && t1 == self.p) || t1 > self.p || self.t2.is_empty());
        let victim = if from_t1 { self.t1.lru() } else { self.t2.lru() };
        Ok(victim.map(str::to_string))
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        if let Some(size) = self.t1.remove(&obj.key) {
            self.t2.insert_mru(&obj.key, size);
        } else {
            self.t2.touch(&obj.key);
        }
        Ok(())
    }

    fn update_after_insert(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult {
        if self.b1.contains(&obj.key) || self.b2.contains(&obj.key) {
            self.adapt(snap, obj);
            self.b1.remove(&obj.key);
            self.b2.remove(&obj.key);
            self.t2.insert_mru(&obj.key, obj.size);
        } else {
            self.t1.insert_mru(&obj.key, obj.size);
        }
        self.trim_ghosts(snap.capacity);
        Ok(())
    }

    fn update_after_evict(&mut self, snap: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if self.t1.remove(&evicted.key).is_some() {
            self.b1.push(&evicted.key, evicted.size);
        } else if self.t2.remove(&evicted.key).is_some() {
            self.b2.push(&evicted.key, evicted.size);
        }
        self.trim_ghosts(snap.capacity);
        Ok(())
    }
}
