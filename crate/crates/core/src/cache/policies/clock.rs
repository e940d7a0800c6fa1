use std::collections::{HashMap, VecDeque};

use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

/// One-bit CLOCK. The ring front is the hand; a survivor is rotated behind
/// it with its bit cleared, and new objects enter just behind the hand with
/// the bit clear.
#[derive(Debug, Default)]
pub struct Clock {
    ring: VecDeque<String>,
    referenced: HashMap<String, bool>,
}

impl CachePolicy for Clock {
    fn name(&self) -> &str {
        "clock"
    }

    fn evict(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        // Terminates: every pass clears the bit it rotates past.
        for _ in 0..=2 * self.ring.len() {
            let Some(front) = self.ring.front() else { break };
            if self.referenced.get(front).copied().unwrap_or(false) {
                self.referenced.insert(front.clone(), false);
                self.ring.rotate_left(1);
            } else {
                return Ok(Some(front.clone()));
            }
        }
        Ok(self.ring.front().cloned())
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        if let Some(bit) = self.referenced.get_mut(&obj.key) {
            *bit = true;
        }
        Ok(())
    }

    fn update_after_insert(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        self.ring.push_back(obj.key.clone());
        self.referenced.insert(obj.key.clone(), false);
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if self.ring.front() == Some(&evicted.key) {
            self.ring.pop_front();
        } else if let Some(i) = self.ring.iter().position(|k| *k == evicted.key) {
            self.ring.remove(i);
        }
        self.referenced.remove(&evicted.key);
        Ok(())
    }
}
