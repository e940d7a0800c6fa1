use super::LruList;
use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

#[derive(Debug, Default)]
pub struct Lru {
    list: LruList,
}

impl CachePolicy for Lru {
    fn name(&self) -> &str {
        "lru"
    }

    fn evict(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        Ok(self.list.lru().map(str::to_string))
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        self.list.touch(&obj.key);
        Ok(())
    }

    fn update_after_insert(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        self.list.insert_mru(&obj.key, obj.size);
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        self.list.remove(&evicted.key);
        Ok(())
    }
}
