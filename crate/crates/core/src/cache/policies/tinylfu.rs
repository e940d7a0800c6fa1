use super::{stable_hash, LruList};
use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

const ROWS: usize = 4;
const COUNTER_MAX: u8 = 15;
const DOOR_PROBES: u64 = 2;

#[derive(Debug, Clone)]
struct Sketch {
    width: usize,
    counters: Vec<u8>,
    door: Vec<u64>,
    door_bits: usize,
    recorded: u64,
    sample: u64,
}

impl Sketch {
    fn new(width: usize, door_bits: usize, sample: u64) -> Self {
        Self {
            width,
            counters: vec![0; ROWS * width],
            door: vec![0; door_bits.div_ceil(64)],
            door_bits,
            recorded: 0,
            sample,
        }
    }

    fn door_slots<'a>(&self, key: &'a str) -> impl Iterator<Item = usize> + 'a {
        let bits = self.door_bits as u64;
        (0..DOOR_PROBES).map(move |p| (stable_hash(key, 0xd0 + p) % bits) as usize)
    }

    fn door_contains(&self, key: &str) -> bool {
        self.door_slots(key).all(|b| self.door[b / 64] & (1 << (b % 64)) != 0)
    }

    fn slot(&self, key: &str, row: usize) -> usize {
        row * self.width + (stable_hash(key, row as u64 + 1) % self.width as u64) as usize
    }

    fn record(&mut self, key: &str) {
        if self.door_contains(key) {
            for row in 0..ROWS {
                let s = self.slot(key, row);
                self.counters[s] = (self.counters[s] + 1).min(COUNTER_MAX);
            }
        } else {
            let slots: Vec<usize> = self.door_slots(key).collect();
            for b in slots {
                self.door[b / 64] |= 1 << (b % 64);
            }
        }
        self.recorded += 1;
        if self.recorded.is_multiple_of(self.sample) {
            for c in &mut self.counters {
                *c /= 2;
            }
            self.door.iter_mut().for_each(|w| *w = 0);
        }
    }

    fn estimate(&self, key: &str) -> u32 {
        let min = (0..ROWS)
            .map(|row| self.counters[self.slot(key, row)])
            .min()
            .unwrap_or(0);
        u32::from(min) + u32::from(self.door_contains(key))
    }
}

/// Window-TinyLFU: new objects land in a small LRU window; a window object
/// leaving it enters the main LRU only if the frequency sketch rates it
/// strictly above the main victim.
#[derive(Debug)]
pub struct TinyLfu {
    window_fraction: f64,
    width_factor: u64,
    sample_factor: u64,
    window_target: u64,
    sketch: Option<Sketch>,
    window: LruList,
    main: LruList,
}

impl TinyLfu {
    pub fn new(window_fraction: f64, width_factor: u64, sample_factor: u64) -> Self {
        Self {
            window_fraction,
            width_factor,
            sample_factor,
            window_target: 1,
            sketch: None,
            window: LruList::default(),
            main: LruList::default(),
        }
    }

    fn sketch(&mut self, capacity: u64) -> &mut Sketch {
        if self.sketch.is_none() {
            self.window_target = ((self.window_fraction * capacity as f64) as u64).max(1);
            let width = (self.width_factor * capacity).max(4) as usize;
            self.sketch = Some(Sketch::new(
                width,
                (8 * capacity).max(64) as usize,
                (self.sample_factor * capacity).max(1),
            ));
        }
        self.sketch.as_mut().unwrap()
    }
}

impl CachePolicy for TinyLfu {
    fn name(&self) -> &str {
        "tinylfu"
    }

    fn evict(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult<Option<String>> {
        self.sketch(snap.capacity);
        let sketch = self.sketch.as_ref().unwrap();
        let window_full = self.window.bytes() + obj.size > self.window_target;
        if window_full && !self.window.is_empty() {
            let candidate = self.window.lru().unwrap().to_string();
            let Some(victim) = self.main.lru().map(str::to_string) else {
                return Ok(Some(candidate));
            };
            if sketch.estimate(&candidate) > sketch.estimate(&victim) {
                let size = self.window.remove(&candidate).unwrap();
                self.main.insert_mru(&candidate, size);
                return Ok(Some(victim));
            }
            return Ok(Some(candidate));
        }
        Ok(self
            .main
            .lru()
            .or_else(|| self.window.lru())
            .map(str::to_string))
    }

    fn update_after_hit(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult {
        self.sketch(snap.capacity).record(&obj.key);
        if !self.window.touch(&obj.key) {
            self.main.touch(&obj.key);
        }
        Ok(())
    }

    fn update_after_insert(&mut self, snap: &CacheSnapshot, obj: &Request) -> HookResult {
        self.sketch(snap.capacity).record(&obj.key);
        self.window.insert_mru(&obj.key, obj.size);
        // Free space admits without a contest; overflow just spills to main.
        while self.window.bytes() > self.window_target && self.window.len() > 1 {
            let key = self.window.lru().unwrap().to_string();
            let size = self.window.remove(&key).unwrap();
            self.main.insert_mru(&key, size);
        }
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if self.window.remove(&evicted.key).is_none() {
            self.main.remove(&evicted.key);
        }
        Ok(())
    }
}
