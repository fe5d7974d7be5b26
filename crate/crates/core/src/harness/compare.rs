//! Tightness comparison of the single-operator upper bounds on w(T).

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::GridEcho;
use crate::bounds::{self, BoundEval, BoundId, Operands, Operator, ParamGrid};
use crate::error::Result;
use crate::genlab::{generate_one, Family, FamilySpec};

/// Relative tolerance under which two bounds count as tied.
pub const TIE_REL: f64 = 1e-12;

/// Bounds whose records imply an upper bound on w(T) alone.
pub const SINGLE_OPERATOR_BOUNDS: [BoundId; 8] = [
    BoundId::Eq1Upper,
    BoundId::Eq2Kittaneh,
    BoundId::ElhaddadKittaneh,
    BoundId::Eq3AbuOmar,
    BoundId::Eq11Bhunia,
    BoundId::Th2,
    BoundId::Th2Chain,
    BoundId::Th4,
];

/// The upper bound on w(T) implied by a single-operator record, taking
/// the root that matches the power of w on its left side. `None` for
/// records that do not bound w(T) directly.
pub fn implied_w_bound(e: &BoundEval) -> Option<f64> {
    let link = e.params.get("link").copied();
    match e.bound_id {
        BoundId::Eq1Upper | BoundId::Eq2Kittaneh => Some(e.rhs),
        BoundId::ElhaddadKittaneh => {
            let r = e.params.get("r").copied().unwrap_or(1.0);
            Some(e.rhs.powf(1.0 / (2.0 * r)))
        }
        BoundId::Eq3AbuOmar | BoundId::Eq11Bhunia => Some(e.rhs.sqrt()),
        BoundId::Th2 => Some(e.rhs.powf(0.25)),
        BoundId::Th2Chain if link == Some(1.0) => Some(e.rhs.powf(0.25)),
        BoundId::Th4 if link == Some(0.0) => e.explicit_bound,
        _ => None,
    }
}

/// "lambda=0.5;r=2" style label of the non-link parameters.
pub fn params_label(e: &BoundEval) -> String {
    e.params
        .iter()
        .filter(|(k, _)| k.as_str() != "link")
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Every (bound, params, bound on w) candidate for one operand.
pub fn w_bound_candidates(op: &Operator, grid: &ParamGrid) -> Result<Vec<(BoundId, String, f64)>> {
    let ops = Operands::single(op);
    let mut out = Vec::new();
    for id in SINGLE_OPERATOR_BOUNDS {
        for params in id.grid_points(grid) {
            for e in bounds::evaluate(id, &ops, &params)? {
                if let Some(v) = implied_w_bound(&e) {
                    out.push((id, params_label(&e), v));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub family: Family,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub grid: ParamGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub bound: BoundId,
    pub params: String,
    pub wins: u64,
    pub win_rate: f64,
    /// Mean of (bound − w)/w.
    pub mean_gap: f64,
    pub min_gap: f64,
    pub max_gap: f64,
    pub trials: u64,
}

/// How often a proved ordering between two bounds held.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub ordering: String,
    pub holds: u64,
    pub checks: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightnessTable {
    pub version: String,
    pub family: Family,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub grid: GridEcho,
    pub rows: Vec<CompareRow>,
    pub orderings: Vec<OrderingCheck>,
}

#[derive(Default)]
struct RowAcc {
    wins: u64,
    gap_sum: f64,
    min_gap: f64,
    max_gap: f64,
    trials: u64,
}

#[derive(Default)]
struct OrderAcc {
    holds: u64,
    checks: u64,
}

impl OrderAcc {
    fn check(&mut self, lower: f64, upper: f64) {
        self.checks += 1;
        if lower <= upper + TIE_REL * upper.abs().max(1e-300) {
            self.holds += 1;
        }
    }
}

fn lookup(cands: &[(BoundId, String, f64)], id: BoundId, params: &str) -> Option<f64> {
    cands
        .iter()
        .find(|(b, p, _)| *b == id && p == params)
        .map(|(_, _, v)| *v)
}

pub fn run_compare(cfg: &CompareConfig) -> Result<TightnessTable> {
    FamilySpec {
        family: cfg.family,
        dim: cfg.dim,
        seed: cfg.seed,
        count: cfg.trials.max(1) as usize,
    }
    .validate()?;
    if cfg.trials == 0 {
        return Err(crate::RadlabError::Config("trials must be at least 1".into()));
    }
    let mut rows: BTreeMap<(BoundId, String), RowAcc> = BTreeMap::new();
    let mut orders: BTreeMap<&'static str, OrderAcc> = BTreeMap::new();
    for i in 0..cfg.trials {
        let op = Operator::new(generate_one(cfg.family, cfg.dim, cfg.seed, i)?);
        let w = op.w()?;
        let cands = w_bound_candidates(&op, &cfg.grid)?;
        let best = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        for (id, params, v) in &cands {
            let acc = rows.entry((*id, params.clone())).or_insert_with(|| RowAcc {
                min_gap: f64::INFINITY,
                max_gap: f64::NEG_INFINITY,
                ..RowAcc::default()
            });
            acc.trials += 1;
            if *v <= best + TIE_REL * best.abs() {
                acc.wins += 1;
            }
            if w > 0.0 {
                let gap = (v - w) / w;
                acc.gap_sum += gap;
                acc.min_gap = acc.min_gap.min(gap);
                acc.max_gap = acc.max_gap.max(gap);
            }
        }

        for &lambda in &cfg.grid.lambda {
            let label = format!("lambda={lambda}");
            let outer = lookup(&cands, BoundId::Th2Chain, &label);
            if let (Some(th2), Some(outer)) = (lookup(&cands, BoundId::Th2, &label), outer) {
                orders.entry("th2 <= (1/2 |||T|^4+|T*|^4||)^(1/4)").or_default().check(th2, outer);
            }
        }
        let upper = lookup(&cands, BoundId::Eq1Upper, "");
        let kittaneh = lookup(&cands, BoundId::Eq2Kittaneh, "");
        let elhaddad = lookup(&cands, BoundId::ElhaddadKittaneh, "r=1");
        let abu_omar = lookup(&cands, BoundId::Eq3AbuOmar, "");
        if let (Some(k), Some(u)) = (kittaneh, upper) {
            orders.entry("eq2_kittaneh <= eq1_upper").or_default().check(k, u);
        }
        if let (Some(e), Some(u)) = (elhaddad, upper) {
            orders.entry("elhaddad_kittaneh(r=1) <= eq1_upper").or_default().check(e, u);
        }
        if let (Some(a), Some(e)) = (abu_omar, elhaddad) {
            orders.entry("eq3_abu_omar <= elhaddad_kittaneh(r=1)").or_default().check(a, e);
        }
    }

    let rows = rows
        .into_iter()
        .map(|((bound, params), acc)| {
            let n = acc.trials.max(1) as f64;
            CompareRow {
                bound,
                params,
                wins: acc.wins,
                win_rate: acc.wins as f64 / n,
                mean_gap: acc.gap_sum / n,
                min_gap: acc.min_gap,
                max_gap: acc.max_gap,
                trials: acc.trials,
            }
        })
        .collect();
    let orderings = orders
        .into_iter()
        .map(|(name, acc)| OrderingCheck {
            ordering: name.to_string(),
            holds: acc.holds,
            checks: acc.checks,
            rate: acc.holds as f64 / acc.checks.max(1) as f64,
        })
        .collect();
    Ok(TightnessTable {
        version: super::REPORT_VERSION.to_string(),
        family: cfg.family,
        dim: cfg.dim,
        trials: cfg.trials,
        seed: cfg.seed,
        grid: GridEcho::from(&cfg.grid),
        rows,
        orderings,
    })
}

impl TightnessTable {
    pub fn row(&self, bound: BoundId, params: &str) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.bound == bound && r.params == params)
    }

    pub fn ordering(&self, name: &str) -> Option<&OrderingCheck> {
        self.orderings.iter().find(|o| o.ordering == name)
    }

    /// Columns: bound, params, wins, win_rate, mean_gap, min_gap, max_gap,
    /// trials. One row per (bound, params) candidate.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
