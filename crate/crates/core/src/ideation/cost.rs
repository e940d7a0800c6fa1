use std::collections::BTreeMap;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub stage: String,
    pub model: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub input_per_million: Decimal,
    pub output_per_million: Decimal,
}

/// Per-model USD rates, `{model: {input_per_million, output_per_million}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pricing(pub BTreeMap<String, Rate>);

impl Pricing {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Rates shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(include_str!("../../data/pricing.json")).expect("bundled pricing")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error("no pricing for model {0:?}")]
    UnknownModel(String),
}

/// Exact USD total of a ledger.
pub fn account_cost(entries: &[LedgerEntry], pricing: &Pricing) -> Result<Decimal, CostError> {
    let million = Decimal::from(1_000_000u32);
    let mut total = Decimal::ZERO;
    for e in entries {
        let r = pricing
            .0
            .get(&e.model)
            .ok_or_else(|| CostError::UnknownModel(e.model.clone()))?;
        total += Decimal::from(e.prompt_tokens) * r.input_per_million / million;
        total += Decimal::from(e.completion_tokens) * r.output_per_million / million;
    }
    Ok(total.normalize())
}
