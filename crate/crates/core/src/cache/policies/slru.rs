use super::LruList;
use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

/// Segmented LRU with a probation segment for new objects and a protected
/// segment for objects hit at least once.
#[derive(Debug)]
pub struct Slru {
    probation_fraction: f64,
    protected_cap: Option<u64>,
    probation: LruList,
    protected: LruList,
}

impl Slru {
    pub fn new(probation_fraction: f64) -> Self {
        Self {
            probation_fraction,
            protected_cap: None,
            probation: LruList::default(),
            protected: LruList::default(),
        }
    }

    fn protected_cap(&mut self, capacity: u64) -> u64 {
        *self.protected_cap.get_or_insert_with(|| {
            ((1.0 - self.probation_fraction) * capacity as f64 + 1e-9).floor() as u64
        })
    }
}

impl CachePolicy for Slru {
    fn name(&self) -> &str {
        "slru"
    }

    fn evict(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        Ok(self
            .probation
            .lru()
            .or_else(|| self.protected.lru())
            .map(str::to_string))
    }

    fn update_after_hit(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult {
        let cap = self.protected_cap(snap.capacity);
        if self.protected.touch(&obj.key) {
            return Ok(());
        }
        if let Some(size) = self.probation.remove(&obj.key) {
            self.protected.insert_mru(&obj.key, size);
            while self.protected.bytes() > cap {
                let Some((k, s)) = self.protected.pop_lru() else { break };
                self.probation.insert_mru(&k, s);
            }
        }
        Ok(())
    }

    fn update_after_insert(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult {
        self.protected_cap(snap.capacity);
        self.probation.insert_mru(&obj.key, obj.size);
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if self.probation.remove(&evicted.key).is_none() {
            self.protected.remove(&evicted.key);
        }
        Ok(())
    }
}
