use std::collections::{HashMap, VecDeque};

use super::GhostList;
use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

const MAX_FREQ: u8 = 3;

#[derive(Debug, Clone, Copy)]
struct Meta {
    freq: u8,
    size: u64,
    in_main: bool,
}

/// S3-FIFO: small FIFO, main FIFO with reinsertion, and a ghost FIFO of keys
/// recently evicted from the small queue.
#[derive(Debug)]
pub struct S3Fifo {
    small_fraction: f64,
    ghost_factor: f64,
    promote_threshold: u8,
    small_target: u64,
    ghost_entries: usize,
    small: VecDeque<String>,
    main: VecDeque<String>,
    small_bytes: u64,
    meta: HashMap<String, Meta>,
    ghost: GhostList,
    victim_from_small: bool,
    initialized: bool,
}

impl S3Fifo {
    pub fn new(small_fraction: f64, ghost_factor: f64, promote_threshold: u8) -> Self {
        Self {
            small_fraction,
            ghost_factor,
            promote_threshold,
            small_target: 1,
            ghost_entries: 1,
            small: VecDeque::new(),
            main: VecDeque::new(),
            small_bytes: 0,
            meta: HashMap::new(),
            ghost: GhostList::default(),
            victim_from_small: false,
            initialized: false,
        }
    }

    fn init(&mut self, capacity: u64) {
        if !self.initialized {
            self.small_target = ((self.small_fraction * capacity as f64) as u64).max(1);
            self.ghost_entries = ((self.ghost_factor * capacity as f64) as usize).max(1);
            self.initialized = true;
        }
    }
}

impl CachePolicy for S3Fifo {
    fn name(&self) -> &str {
        "s3fifo"
    }

    fn evict(&mut self, snap: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        self.init(snap.capacity);
        loop {
            if self.small_bytes >= self.small_target || self.main.is_empty() {
                if let Some(key) = self.small.pop_front() {
                    let m = self.meta.get_mut(&key).expect("small key has metadata");
                    self.small_bytes -= m.size;
                    if m.freq >= self.promote_threshold {
                        m.freq = 0;
                        m.in_main = true;
                        self.main.push_back(key);
                        continue;
                    }
                    self.victim_from_small = true;
                    return Ok(Some(key));
                }
            }
            let Some(key) = self.main.pop_front() else {
                return Ok(None);
            };
            let m = self.meta.get_mut(&key).expect("main key has metadata");
            if m.freq > 0 {
                m.freq -= 1;
                self.main.push_back(key);
                continue;
            }
            self.victim_from_small = false;
            return Ok(Some(key));
        }
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        if let Some(m) = self.meta.get_mut(&obj.key) {
            m.freq = (m.freq + 1).min(MAX_FREQ);
        }
        Ok(())
    }

    fn update_after_insert(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult {
        self.init(snap.capacity);
        let in_main = self.ghost.remove(&obj.key);
        if in_main {
            self.main.push_back(obj.key.clone());
        } else {
            self.small.push_back(obj.key.clone());
            self.small_bytes += obj.size;
        }
        self.meta.insert(
            obj.key.clone(),
            Meta {
                freq: 0,
                size: obj.size,
                in_main,
            },
        );
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        let Some(m) = self.meta.remove(&evicted.key) else {
            return Ok(());
        };
        // evict() already dequeued the victim it named.
        if !m.in_main && self.victim_from_small {
            self.ghost.push(&evicted.key, m.size);
            while self.ghost.len() > self.ghost_entries {
                self.ghost.pop_oldest();
            }
        }
        Ok(())
    }
}
