//! The LLM side of a campaign: prompt templates, clients, the waypoint /
//! formulation / coding pipeline, and cost accounting.

mod cost;
mod llm;
mod mock;
mod pipeline;
mod prompts;

pub use cost::{account_cost, CostError, LedgerEntry, Pricing, Rate};
pub use llm::{
    estimate_tokens, prompt_hash, Completion, HttpChatClient, LlmClient, LlmError, RecordingClient,
    ReplayClient,
};
pub use mock::MockLlm;
pub use pipeline::{
    extract_code, extract_json, observation_of, static_check, IdeationConfig, IdeationOutcome,
    Pipeline, StageFailure, WaypointTranscript,
};
pub use prompts::{numbered_hints, PromptError, PromptSet, Template};

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Cache,
    Binpack,
}

impl Problem {
    /// Design-document fields, in prompt order.
    pub fn design_fields(self) -> &'static [&'static str] {
        match self {
            Problem::Cache => &[
                "metadata",
                "evict",
                "update_after_hit",
                "update_after_insert",
                "update_after_evict",
            ],
            Problem::Binpack => &["metadata", "choose_bin"],
        }
    }

    /// Functions generated code must define.
    pub fn required_functions(self) -> &'static [&'static str] {
        match self {
            Problem::Cache => &["evict", "update_after_hit", "update_after_insert", "update_after_evict"],
            Problem::Binpack => &["choose_bin"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Cache => "cache",
            Problem::Binpack => "binpack",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cache" => Ok(Problem::Cache),
            "binpack" => Ok(Problem::Binpack),
            other => Err(format!("unknown problem {other:?} (expected cache or binpack)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "repeated")]
    Repeated,
    #[serde(rename = "rsdict")]
    Rsdict,
    #[serde(rename = "rsdict-sf")]
    RsdictSf,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Repeated => "repeated",
            Strategy::Rsdict => "rsdict",
            Strategy::RsdictSf => "rsdict-sf",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "repeated" => Ok(Strategy::Repeated),
            "rsdict" => Ok(Strategy::Rsdict),
            "rsdict-sf" => Ok(Strategy::RsdictSf),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Natural-language policy description, one entry per design field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignDoc(pub IndexMap<String, String>);

impl DesignDoc {
    pub fn get(&self, field: &str) -> Option<&str> {
        self.0.get(field).map(String::as_str)
    }

    /// All fields joined by newlines, in document order.
    pub fn concat(&self) -> String {
        self.0.values().cloned().collect::<Vec<_>>().join("\n")
    }
}
