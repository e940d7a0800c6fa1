use std::collections::{BTreeMap, HashMap};

use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

/// In-cache LFU. Frequency resets on eviction; ties go to the least
/// recently accessed object.
#[derive(Debug, Default)]
pub struct Lfu {
    tick: u64,
    meta: HashMap<String, (u64, u64)>,
    order: BTreeMap<(u64, u64), String>,
}

impl Lfu {
    fn bump(&mut self, key: &str, reset: bool) {
        self.tick += 1;
        let freq = match self.meta.get(key) {
            Some(&(f, t)) => {
                self.order.remove(&(f, t));
                if reset {
                    1
                } else {
                    f + 1
                }
            }
            None => 1,
        };
        self.meta.insert(key.to_string(), (freq, self.tick));
        self.order.insert((freq, self.tick), key.to_string());
    }
}

impl CachePolicy for Lfu {
    fn name(&self) -> &str {
        "lfu"
    }

    fn evict(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        Ok(self.order.values().next().cloned())
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        self.bump(&obj.key, false);
        Ok(())
    }

    fn update_after_insert(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        self.bump(&obj.key, true);
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if let Some(k) = self.meta.remove(&evicted.key) {
            self.order.remove(&k);
        }
        Ok(())
    }
}
