//! Adversarial hill climbing on bound slack.
//!
//! Operands are kept at unit Frobenius norm so slacks from different
//! starts are comparable. Each restart draws fresh operands and takes
//! Gaussian steps of adaptive size, accepting a step when the minimum slack
//! over the bound's records decreases.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::Value;

use super::compare::params_label;
use crate::bounds::{self, Arity, BoundEval, BoundId, BoundParams, Operator};
use crate::error::{RadlabError, Result};
use crate::genlab::{self, Family, KantorovichCert};
use crate::matcore::{ComplexMatrix, C64};
use crate::rng;

/// Iterations per restart.
pub const ITERS_PER_RESTART: u64 = 1000;
const STEP_START: f64 = 0.3;
const STEP_MAX: f64 = 1.0;
const STEP_MIN: f64 = 1e-6;
const STEP_GROW: f64 = 1.5;
const STEP_SHRINK: f64 = 0.95;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub bound: BoundId,
    pub params: BoundParams,
    pub dim: usize,
    pub seed: u64,
    pub iters: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub bound_id: BoundId,
    pub params: String,
    pub dim: usize,
    pub seed: u64,
    pub iters: u64,
    pub restarts: u64,
    /// Objective evaluations actually performed.
    pub evaluations: u64,
    pub min_slack: Option<f64>,
    /// The record attaining `min_slack`.
    pub min_record: Option<BoundEval>,
    pub operands: Vec<Value>,
    /// Why nothing was evaluated, when that happens.
    pub skipped: Option<String>,
}

impl SearchResult {
    pub fn is_violation(&self, tol: f64) -> bool {
        self.min_record.as_ref().is_some_and(|e| e.is_violation(tol))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn operand_count(arity: Arity) -> usize {
    match arity {
        Arity::Single | Arity::Certified => 1,
        Arity::Pair | Arity::RealPair => 2,
        Arity::Quad => 4,
    }
}

fn normalized(m: ComplexMatrix) -> ComplexMatrix {
    let f = m.frobenius();
    if f > 0.0 {
        m.scale(C64::new(1.0 / f, 0.0))
    } else {
        m
    }
}

/// The record with the smallest slack, over every record the bound emits.
fn objective(
    id: BoundId,
    params: &BoundParams,
    mats: &[ComplexMatrix],
    cert: Option<&KantorovichCert>,
) -> Result<BoundEval> {
    let ops: Vec<Operator> = mats.iter().cloned().map(Operator::new).collect();
    let records = bounds::evaluate_operators(id, &ops, cert, params)?;
    records
        .into_iter()
        .min_by(|a, b| a.slack.total_cmp(&b.slack))
        .ok_or_else(|| RadlabError::Config(format!("bound {id} produced no records")))
}

fn perturb(m: &ComplexMatrix, step: f64, real: bool, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let n = m.dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
            row.push(m.get(i, j) + C64::new(re, im) * step);
        }
        rows.push(row);
    }
    normalized(ComplexMatrix::from_rows(&rows).expect("square rows"))
}

/// Hill-climbs the operands of `cfg.bound` to minimize its slack.
///
/// Bounds that need a certified operand first scan `iters` Kantorovich
/// candidates; with no certified operand the result is returned with
/// `skipped` set and no evaluations.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchResult> {
    let id = cfg.bound;
    if cfg.iters == 0 {
        return Err(RadlabError::Config("iters must be at least 1".into()));
    }
    genlab::FamilySpec {
        family: Family::Ginibre,
        dim: cfg.dim,
        seed: cfg.seed,
        count: 1,
    }
    .validate()?;
    let label = params_label_of(id, &cfg.params);
    let mut result = SearchResult {
        bound_id: id,
        params: label,
        dim: cfg.dim,
        seed: cfg.seed,
        iters: cfg.iters,
        restarts: 0,
        evaluations: 0,
        min_slack: None,
        min_record: None,
        operands: Vec::new(),
        skipped: None,
    };

    let arity = id.arity();
    let real = arity == Arity::RealPair;
    let family = if real { Family::RealGinibre } else { Family::Ginibre };
    let count = operand_count(arity);

    let mut certified: Vec<(ComplexMatrix, KantorovichCert)> = Vec::new();
    if arity == Arity::Certified {
        let budget = usize::try_from(cfg.iters).unwrap_or(usize::MAX);
        let scan = genlab::kantorovich_scan(cfg.dim, rng::mix(cfg.seed, rng::tag("search")), budget)?;
        if scan.hits.is_empty() {
            result.skipped = Some(format!(
                "no certified operand among {} candidates (largest maximal multiple {})",
                scan.candidates, scan.best_m
            ));
            return Ok(result);
        }
        certified = scan.hits;
    }

    let restarts = (cfg.iters / ITERS_PER_RESTART).max(1);
    let steps = cfg.iters / restarts;
    result.restarts = restarts;
    let tag = rng::tag(id.as_str());
    let mut best: Option<(BoundEval, Vec<ComplexMatrix>)> = None;

    for restart in 0..restarts {
        let mut rng = rng::stream(rng::mix(cfg.seed, cfg.dim as u64), tag, restart);
        let (mut mats, cert) = if arity == Arity::Certified {
            let (t, c) = certified[(restart % certified.len() as u64) as usize].clone();
            (vec![t], Some(c))
        } else {
            let mats = (0..count as u64)
                .map(|k| {
                    genlab::generate_one(family, cfg.dim, rng::mix(cfg.seed, k), restart).map(normalized)
                })
                .collect::<Result<Vec<_>>>()?;
            (mats, None)
        };
        let mut current = objective(id, &cfg.params, &mats, cert.as_ref())?;
        result.evaluations += 1;
        let mut step = STEP_START;
        for _ in 1..steps {
            let trial: Vec<ComplexMatrix> = mats.iter().map(|m| perturb(m, step, real, &mut rng)).collect();
            let trial_cert = match arity {
                Arity::Certified => match genlab::certify_kantorovich(&trial[0]) {
                    Ok(Some(c)) => Some(c),
                    _ => {
                        step = (step * STEP_SHRINK).max(STEP_MIN);
                        continue;
                    }
                },
                _ => None,
            };
            let candidate = match objective(id, &cfg.params, &trial, trial_cert.as_ref()) {
                Ok(c) => c,
                Err(RadlabError::NotInvertible { .. } | RadlabError::HypothesisFailed(_)) => {
                    step = (step * STEP_SHRINK).max(STEP_MIN);
                    continue;
                }
                Err(e) => return Err(e),
            };
            result.evaluations += 1;
            if candidate.slack < current.slack {
                current = candidate;
                mats = trial;
                step = (step * STEP_GROW).min(STEP_MAX);
            } else {
                step = (step * STEP_SHRINK).max(STEP_MIN);
            }
        }
        if best.as_ref().is_none_or(|(b, _)| current.slack < b.slack) {
            best = Some((current, mats));
        }
    }

    if let Some((record, mats)) = best {
        result.min_slack = Some(record.slack);
        result.min_record = Some(record);
        result.operands = mats
            .iter()
            .map(|m| serde_json::from_str(&m.to_json_string()).unwrap_or(Value::Null))
            .collect();
    }
    Ok(result)
}

fn params_label_of(id: BoundId, p: &BoundParams) -> String {
    let mut probe = BoundEval {
        bound_id: id,
        params: Default::default(),
        lhs: 0.0,
        rhs: 0.0,
        slack: 0.0,
        explicit_bound: None,
        hypothesis_ok: true,
        certificates: Default::default(),
    };
    if id.uses_alpha() {
        probe.params.insert("alpha".into(), p.alpha);
    }
    if id.uses_lambda() {
        probe.params.insert("lambda".into(), p.lambda);
    }
    if id.uses_r() {
        probe.params.insert("r".into(), p.r);
    }
    params_label(&probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(bound: BoundId, params: BoundParams, dim: usize, iters: u64) -> SearchConfig {
        SearchConfig {
            bound,
            params,
            dim,
            seed: 7,
            iters,
        }
    }

    #[test]
    fn norm_bound_search_approaches_equality() {
        let r = run_search(&cfg(BoundId::Eq1Upper, BoundParams::default(), 2, 2000)).unwrap();
        let slack = r.min_slack.unwrap();
        assert!((-1e-9..1e-3).contains(&slack), "slack {slack}");
        assert_eq!(r.operands.len(), 1);
        assert_eq!(r.restarts, 2);
    }

    #[test]
    fn search_is_deterministic() {
        let c = cfg(
            BoundId::Th2,
            BoundParams {
                lambda: 0.5,
                ..BoundParams::default()
            },
            3,
            300,
        );
        assert_eq!(run_search(&c).unwrap(), run_search(&c).unwrap());
    }

    #[test]
    fn certified_bounds_report_a_skip() {
        let r = run_search(&cfg(BoundId::KantTh1Cor, BoundParams::default(), 2, 200)).unwrap();
        assert!(r.skipped.is_some());
        assert_eq!(r.evaluations, 0);
        assert!(r.min_slack.is_none());
    }

    #[test]
    fn real_pair_search_stays_real() {
        let r = run_search(&cfg(BoundId::PolarizationProp, BoundParams::default(), 2, 100)).unwrap();
        assert!(r.min_slack.unwrap() >= -1e-9);
        for op in &r.operands {
            let m = ComplexMatrix::from_json_str(&op.to_string()).unwrap();
            assert!(m.is_real());
        }
    }
}
