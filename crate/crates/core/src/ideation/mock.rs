//! Offline stand-in for a chat model. Every answer is a pure function of
//! (seed, prompt), shaped like a real response to the bundled templates.
//! Ideas map onto the built-in policy families so that generated
//! solutions can be evaluated natively.

use sha2::{Digest, Sha256};

use super::llm::{estimated, Completion, LlmClient, LlmError};
use super::pipeline::RETRY_NOTE;

struct Idea {
    concept: &'static str,
    family: &'static str,
    sentence: &'static str,
}

const CACHE_IDEAS: &[Idea] = &[
    Idea { concept: "cycle", family: "clock", sentence: "a cyclic pointer can be maintained to track cached objects and determine eviction victims" },
    Idea { concept: "segmentation", family: "slru", sentence: "a cache can be divided into segments with different eviction priorities, and objects can be promoted between segments on reuse" },
    Idea { concept: "sifting", family: "sieve", sentence: "a hand can sweep from older to newer objects, keeping only those revisited since its last pass" },
    Idea { concept: "queueing", family: "fifo", sentence: "objects can leave the cache in the same order they arrived" },
    Idea { concept: "forgetting", family: "lru", sentence: "the object left untouched for the longest time can be forgotten first" },
    Idea { concept: "popularity", family: "lfu", sentence: "each object can carry a popularity count, and the least popular object is evicted" },
    Idea { concept: "probation", family: "s3fifo", sentence: "new objects can serve a short probation in a small queue before earning a place in the main cache" },
    Idea { concept: "gatekeeping", family: "tinylfu", sentence: "a compact frequency sketch can act as a gatekeeper that admits a newcomer only if it is more popular than the victim" },
    Idea { concept: "balance", family: "arc", sentence: "the cache can balance space between recently seen and frequently seen objects, steered by the history of past evictions" },
];

const BIN_IDEAS: &[Idea] = &[
    Idea { concept: "tightness", family: "best_fit", sentence: "each item can go where it leaves the least free space behind" },
    Idea { concept: "spreading", family: "worst_fit", sentence: "each item can go into the emptiest open bin to keep room everywhere" },
    Idea { concept: "restraint", family: "almost_worst_fit", sentence: "each item can go into the second emptiest bin, keeping the emptiest one in reserve" },
    Idea { concept: "precedence", family: "first_fit", sentence: "each item can take the earliest opened bin that still has room" },
    Idea { concept: "momentum", family: "next_fit", sentence: "only the most recent bin stays open, and a new one replaces it once an item does not fit" },
    Idea { concept: "harmony", family: "harmonic_k", sentence: "items can be grouped into size classes, each packed into its own bins" },
    Idea { concept: "refinement", family: "refined_first_fit", sentence: "items can be sorted into a few refined size classes, with some medium pieces deliberately paired with large ones" },
];

const BRIDGES: &[&str] = &[
    "structure", "motion", "order", "growth", "boundary", "exchange", "rhythm", "pressure",
    "memory", "selection", "flow", "hierarchy",
];

const CACHE_HABITS: &[&str] = &["lru", "lfu", "fifo"];
const BIN_HABITS: &[&str] = &["first_fit", "best_fit", "next_fit"];

#[derive(Debug, Clone)]
pub struct MockLlm {
    seed: u64,
}

impl MockLlm {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn hash(&self, parts: &[&str]) -> u64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        for p in parts {
            h.update(p.as_bytes());
            h.update([0]);
        }
        u64::from_le_bytes(h.finalize()[..8].try_into().expect("8 bytes"))
    }

    fn respond(&self, prompt: &str) -> String {
        let binpack = prompt.contains("bin packing");
        let ideas = if binpack { BIN_IDEAS } else { CACHE_IDEAS };
        let retry = prompt.contains(RETRY_NOTE);
        if let Some(word) = line_after(prompt, "**The given word or phrase**: ") {
            return self.waypoint(word, ideas);
        }
        if prompt.contains("[Begin of Python code framework]") {
            return self.code(prompt, binpack, retry);
        }
        if prompt.contains("Provide your creative policy using the following JSON structure") {
            return self.design(prompt, binpack, ideas, retry);
        }
        "I am not sure how to help with that.".to_string()
    }

    fn waypoint(&self, word: &str, ideas: &[Idea]) -> String {
        let h = self.hash(&["waypoint", word]);
        let idea = &ideas[(h % ideas.len() as u64) as usize];
        let bridge = BRIDGES[((h >> 16) % BRIDGES.len() as u64) as usize];
        format!(
            "\"{}\" relates to the concept of \"{bridge}\".\n\n\"{}\" relates to \"{}\".\n\nInspired by \"{}\", {}.",
            capitalize(word),
            capitalize(bridge),
            idea.concept,
            idea.concept,
            idea.sentence
        )
    }

    fn design(&self, prompt: &str, binpack: bool, ideas: &[Idea], retry: bool) -> String {
        let h = self.hash(&["design", prompt]);
        let hints = section(prompt, "using the following hints:\n\n", "\n\nProvide your creative policy");
        let found: Vec<&Idea> = match hints {
            Some(text) => ideas
                .iter()
                .filter(|i| text.contains(&format!("\"{}\"", i.concept)))
                .collect(),
            None => Vec::new(),
        };
        let family = if found.is_empty() {
            let habits = if binpack { BIN_HABITS } else { CACHE_HABITS };
            habits[(h % habits.len() as u64) as usize]
        } else {
            found[(h % found.len() as u64) as usize].family
        };
        let variant = variant_of(family, h >> 20);
        let summary = ideas
            .iter()
            .find(|i| i.family == family)
            .map(|i| i.sentence)
            .unwrap_or("a simple rule is applied");
        let fields: Vec<(&str, String)> = if binpack {
            vec![
                ("metadata", format!("The policy keeps per-bin bookkeeping needed for its rule (variant: {variant}).")),
                ("choose_bin", format!("Following the idea that {summary}, the policy picks a feasible bin or opens a new one.")),
            ]
        } else {
            vec![
                ("metadata", format!("The policy keeps per-object bookkeeping needed for its rule (variant: {variant}).")),
                ("evict", format!("Following the idea that {summary}, the policy selects the victim accordingly.")),
                ("update_after_hit", "The policy refreshes the hit object's bookkeeping.".to_string()),
                ("update_after_insert", "The policy initializes bookkeeping for the inserted object.".to_string()),
                ("update_after_evict", "The policy drops or archives the victim's bookkeeping.".to_string()),
            ]
        };
        let drop_field = !retry && h.is_multiple_of(11);
        let body: Vec<String> = fields
            .iter()
            .filter(|(k, _)| !(drop_field && *k == "metadata"))
            .map(|(k, v)| format!("  {}: {}", serde_json::to_string(k).unwrap(), serde_json::to_string(v).unwrap()))
            .collect();
        format!("```json\n{{\n{}\n}}\n```", body.join(",\n"))
    }

    fn code(&self, prompt: &str, binpack: bool, retry: bool) -> String {
        let h = self.hash(&["code", prompt]);
        let variant = section(prompt, "(variant: ", ")").unwrap_or(if binpack { "first_fit" } else { "lru" });
        let banned = !retry && h.is_multiple_of(7);
        let mut src = String::new();
        src.push_str(&format!("# forge-builtin: {variant}\n"));
        src.push_str("# Import anything you need below. You must not use any randomness. For example, you cannot `import random`. Also, you cannot use any function in `numpy` that uses randomness, such as the functions in `numpy.random`.\n");
        if banned {
            src.push_str("import random\n");
        }
        src.push_str("# Put tunable constant parameters below\n");
        src.push_str("# Put the metadata specifically maintained by the policy below.\n");
        src.push_str("metadata = {}\n");
        let defs: &[&str] = if binpack {
            &["def choose_bin(item, bins):"]
        } else {
            &[
                "def evict(cache_snapshot, obj):",
                "def update_after_hit(cache_snapshot, obj):",
                "def update_after_insert(cache_snapshot, obj):",
                "def update_after_evict(cache_snapshot, obj, evicted_obj):",
            ]
        };
        for d in defs {
            src.push_str(&format!("{d}\n    raise NotImplementedError(\"evaluated natively: {variant}\")\n"));
        }
        format!("```python\n{src}```")
    }
}

fn variant_of(family: &str, h: u64) -> String {
    let pick = |xs: &[&str]| xs[(h % xs.len() as u64) as usize].to_string();
    match family {
        "slru" => format!("slru probation={}", pick(&["0.1", "0.2", "0.3", "0.4", "0.5"])),
        "s3fifo" => format!("s3fifo small={}", pick(&["0.05", "0.1", "0.2", "0.3"])),
        "tinylfu" => format!("tinylfu window={}", pick(&["0.01", "0.05", "0.1", "0.2"])),
        "harmonic_k" => format!("harmonic_k k={}", pick(&["2", "3", "4", "5", "6", "7", "8"])),
        other => other.to_string(),
    }
}

fn line_after<'a>(text: &'a str, marker: &str) -> Option<&'a str> {
    let start = text.find(marker)? + marker.len();
    let rest = &text[start..];
    Some(rest.lines().next().unwrap_or("").trim())
}

fn section<'a>(text: &'a str, open: &str, close: &str) -> Option<&'a str> {
    let start = text.find(open)? + open.len();
    let end = text[start..].find(close)? + start;
    Some(&text[start..end])
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl LlmClient for MockLlm {
    fn id(&self) -> &str {
        "mock"
    }

    fn complete(&self, _model: &str, prompt: &str, _temperature: f64) -> Result<Completion, LlmError> {
        Ok(estimated(prompt, self.respond(prompt)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideation::{observation_of, Problem, PromptSet};

    #[test]
    fn waypoint_answers_follow_the_format() {
        let p = PromptSet::builtin(Problem::Cache);
        let m = MockLlm::new(0);
        let text = m.complete("x", &p.waypoint("flower").unwrap(), 1.0).unwrap().text;
        assert!(text.starts_with("\"Flower\" relates to the concept of"));
        let obs = observation_of(&text);
        assert!(obs.starts_with("Inspired by \""));
        assert_eq!(text, m.complete("x", &p.waypoint("flower").unwrap(), 1.0).unwrap().text);
    }

    #[test]
    fn design_reflects_hints() {
        let p = PromptSet::builtin(Problem::Cache);
        let m = MockLlm::new(0);
        let prompt = p.formulate(Some("1. Inspired by \"segmentation\", segments.")).unwrap();
        let text = m.complete("x", &prompt, 1.0).unwrap().text;
        assert!(text.contains("(variant: slru probation="));
    }

    #[test]
    fn variants_parse_as_params() {
        for h in 0..10 {
            for f in ["slru", "s3fifo", "tinylfu", "harmonic_k", "lru"] {
                let v = variant_of(f, h);
                let (name, rest) = v.split_once(' ').unwrap_or((&v, ""));
                assert_eq!(name, f);
                crate::cache::PolicyParams::parse(rest).unwrap();
            }
        }
    }
}
