use std::collections::HashMap;

use crate::cache::{CachePolicy, CacheSnapshot, HookResult};
use crate::trace::Request;

#[derive(Debug)]
struct Node {
    key: String,
    visited: bool,
    /// Toward the head (newer).
    newer: Option<usize>,
    /// Toward the tail (older).
    older: Option<usize>,
}

/// SIEVE: a FIFO queue whose hand sweeps from tail to head, clearing visited
/// bits and evicting the first unvisited object. Survivors stay in place.
#[derive(Debug, Default)]
pub struct Sieve {
    nodes: Vec<Node>,
    free: Vec<usize>,
    index: HashMap<String, usize>,
    head: Option<usize>,
    tail: Option<usize>,
    hand: Option<usize>,
}

impl Sieve {
    fn unlink(&mut self, i: usize) {
        let (newer, older) = (self.nodes[i].newer, self.nodes[i].older);
        match newer {
            Some(n) => self.nodes[n].older = older,
            None => self.head = older,
        }
        match older {
            Some(o) => self.nodes[o].newer = newer,
            None => self.tail = newer,
        }
        if self.hand == Some(i) {
            self.hand = newer;
        }
        self.free.push(i);
    }
}

impl CachePolicy for Sieve {
    fn name(&self) -> &str {
        "sieve"
    }

    fn evict(&mut self, _: &CacheSnapshot, _: &Request) -> HookResult<Option<String>> {
        let Some(mut cur) = self.hand.or(self.tail) else {
            return Ok(None);
        };
        while self.nodes[cur].visited {
            self.nodes[cur].visited = false;
            cur = self.nodes[cur].newer.or(self.tail).expect("non-empty list");
        }
        self.hand = Some(cur);
        Ok(Some(self.nodes[cur].key.clone()))
    }

    fn update_after_hit(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        if let Some(&i) = self.index.get(&obj.key) {
            self.nodes[i].visited = true;
        }
        Ok(())
    }

    fn update_after_insert(&mut self, _: &CacheSnapshot, obj: &Request) -> HookResult {
        let node = Node {
            key: obj.key.clone(),
            visited: false,
            newer: None,
            older: self.head,
        };
        let i = match self.free.pop() {
            Some(i) => {
                self.nodes[i] = node;
                i
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        };
        if let Some(h) = self.head {
            self.nodes[h].newer = Some(i);
        }
        self.head = Some(i);
        if self.tail.is_none() {
            self.tail = Some(i);
        }
        self.index.insert(obj.key.clone(), i);
        Ok(())
    }

    fn update_after_evict(&mut self, _: &CacheSnapshot, _: &Request, evicted: &Request) -> HookResult {
        if let Some(i) = self.index.remove(&evicted.key) {
            // The hand moves to the evicted node's newer neighbour (unlink does it).
            self.unlink(i);
        }
        Ok(())
    }
}
