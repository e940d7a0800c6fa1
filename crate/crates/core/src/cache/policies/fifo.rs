use std::collections::VecDeque;

use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

#[derive(Debug, Default)]
pub struct Fifo {
    queue: VecDeque<String>,
}

impl CachePolicy for Fifo {
    fn name(&self) -> &str {
        "fifo"
    }

    fn evict(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        Ok(self.queue.front().cloned())
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult {
        Ok(())
    }

    fn update_after_insert(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        self.queue.push_back(obj.key.clone());
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if self.queue.front() == Some(&evicted.key) {
            self.queue.pop_front();
        } else if let Some(i) = self.queue.iter().position(|k| *k == evicted.key) {
            self.queue.remove(i);
        }
        Ok(())
    }
}
