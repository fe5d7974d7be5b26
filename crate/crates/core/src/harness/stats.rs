//! Streaming per-suite aggregation.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

/// Nearest-rank quantiles of `values` (sorted in place).
pub fn quantiles(values: &mut [f64]) -> Option<Quantiles> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let pick = |q: f64| {
        let rank = (q * values.len() as f64).ceil() as usize;
        values[rank.clamp(1, values.len()) - 1]
    };
    Some(Quantiles {
        p05: pick(0.05),
        p50: pick(0.50),
        p95: pick(0.95),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LinkStats {
    pub evaluations: u64,
    pub violations: u64,
}

/// Accumulates slack records for one suite.
#[derive(Clone, Debug, Default)]
pub struct SlackAccumulator {
    slacks: Vec<f64>,
    pub violations: u64,
    pub min_slack: Option<f64>,
    pub links: BTreeMap<u32, LinkStats>,
}

impl SlackAccumulator {
    pub fn push(&mut self, slack: f64, violation: bool, link: Option<u32>) {
        self.slacks.push(slack);
        if violation {
            self.violations += 1;
        }
        self.min_slack = Some(self.min_slack.map_or(slack, |m| m.min(slack)));
        if let Some(k) = link {
            let entry = self.links.entry(k).or_default();
            entry.evaluations += 1;
            if violation {
                entry.violations += 1;
            }
        }
    }

    pub fn evaluations(&self) -> u64 {
        self.slacks.len() as u64
    }

    pub fn quantiles(&mut self) -> Option<Quantiles> {
        quantiles(&mut self.slacks)
    }
}
