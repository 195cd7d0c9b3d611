use std::collections::BTreeMap;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::ui_model::AltTextResult;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeCost {
    pub requests: u64,
    pub cached: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub usd: Decimal,
}

impl ModeCost {
    fn add(&mut self, r: &AltTextResult) {
        self.requests += 1;
        if r.cached {
            self.cached += 1;
        }
        self.prompt_tokens += r.token_usage.prompt_tokens;
        self.completion_tokens += r.token_usage.completion_tokens;
        self.usd += r.cost_usd;
    }
}

/// Inference spend plus an optional fine-tune estimate, in USD.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub inference_usd: Decimal,
    pub finetune_estimate_usd: Option<Decimal>,
    pub total_usd: Decimal,
    pub fresh: ModeCost,
    pub cached: ModeCost,
    /// Keyed by the mode's display name (`TextT`, `MMT_i`, `MMT_c`).
    pub by_mode: BTreeMap<String, ModeCost>,
}

pub fn account_costs(results: &[AltTextResult], finetune_estimate: Option<Decimal>) -> CostSummary {
    let mut s = CostSummary {
        finetune_estimate_usd: finetune_estimate,
        ..Default::default()
    };
    for r in results {
        s.inference_usd += r.cost_usd;
        s.by_mode.entry(r.mode.to_string()).or_default().add(r);
        if r.cached {
            s.cached.add(r);
        } else {
            s.fresh.add(r);
        }
    }
    s.total_usd = s.inference_usd + finetune_estimate.unwrap_or_default();
    s
}
