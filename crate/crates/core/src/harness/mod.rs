//! Batch verification, counterexample search and tightness comparison.
//!
//! Trials are keyed by index: trial `i` runs at `dims[i % nd]` on family
//! `families[(i / nd) % nf]`, and every random draw is addressed by
//! `(seed, slot, i)`. Aggregation is a fold in index order, so a report
//! depends only on its configuration.

pub mod compare;
pub mod lemma_suite;
pub mod search;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::bounds::{self, Arity, BoundEval, BoundId, Operands, Operator, OperatorPair, OperatorQuad, ParamGrid};
use crate::error::{RadlabError, Result};
use crate::genlab::{self, Family, KantorovichCert};
use crate::matcore::ComplexMatrix;
use crate::rng;
use lemma_suite::{LemmaId, LemmaRecord};
use stats::{LinkStats, Quantiles, SlackAccumulator};

pub const REPORT_VERSION: &str = concat!("radlab ", env!("CARGO_PKG_VERSION"));

/// w ≤ explicit bound + this, for self-referential bounds.
pub const EXPLICIT_ABS_TOL: f64 = 1e-8;
/// Relative residual allowed in the defining quadratic of an explicit bound.
pub const QUADRATIC_TOL: f64 = 1e-10;
/// Allowed gap between the direct r = 1 instance and the general formula.
pub const R1_GAP_TOL: f64 = 1e-12;

/// Seed slots for the operands of one trial.
const SLOT_T: u64 = 0;
const SLOT_S: u64 = 1;
const SLOT_C: u64 = 2;
const SLOT_D: u64 = 3;
const SLOT_REAL_T: u64 = 4;
const SLOT_REAL_S: u64 = 5;
const SLOT_KANTOROVICH: u64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuiteId {
    Bound(BoundId),
    Lemma(LemmaId),
}

impl SuiteId {
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Bound(b) => b.as_str(),
            SuiteId::Lemma(l) => l.as_str(),
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            SuiteId::Bound(_) => "bound",
            SuiteId::Lemma(_) => "lemma",
        }
    }

    pub fn all() -> BTreeSet<SuiteId> {
        BoundId::ALL
            .iter()
            .map(|&b| SuiteId::Bound(b))
            .chain(LemmaId::ALL.iter().map(|&l| SuiteId::Lemma(l)))
            .collect()
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = RadlabError;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(b) = s.parse::<BoundId>() {
            return Ok(SuiteId::Bound(b));
        }
        if let Ok(l) = s.parse::<LemmaId>() {
            return Ok(SuiteId::Lemma(l));
        }
        Err(RadlabError::Config(format!("unknown suite id '{s}'")))
    }
}

impl Serialize for SuiteId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Parses a comma-separated id list; `all` selects the whole catalog.
pub fn parse_suites(s: &str) -> Result<BTreeSet<SuiteId>> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(SuiteId::all());
        } else {
            out.insert(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(RadlabError::Config("no suites selected".into()));
    }
    Ok(out)
}

/// Inclusive dimension range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl DimRange {
    pub fn dims(&self) -> Vec<usize> {
        (self.min..=self.max).collect()
    }
}

impl FromStr for DimRange {
    type Err = RadlabError;

    /// `4`, `2..8` or `2..=8`; both range forms include the upper end.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || RadlabError::Config(format!("invalid dimension range '{s}'"));
        let parse = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
        let (min, max) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let d = parse(s)?;
                (d, d)
            }
        };
        if min > max {
            return Err(bad());
        }
        Ok(Self { min, max })
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| RadlabError::Config(format!("invalid number '{p}'")))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    /// `csv` for a `.csv` path, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = RadlabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(RadlabError::Config(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suites: BTreeSet<SuiteId>,
    pub dims: DimRange,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub grid: ParamGrid,
    /// Operand families rotated across trials.
    pub families: Vec<Family>,
    /// Candidates scanned per dimension for Kantorovich operands.
    pub kantorovich_budget: usize,
    pub format: OutputFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: SuiteId::all(),
            dims: DimRange { min: 2, max: 8 },
            trials: 10_000,
            seed: 42,
            tol: 1e-9,
            grid: ParamGrid::default(),
            families: default_families(),
            kantorovich_budget: 1000,
            format: OutputFormat::Json,
        }
    }
}

/// Every generator except the Kantorovich candidate stream, which is only
/// used through certification.
pub fn default_families() -> Vec<Family> {
    Family::ALL
        .iter()
        .copied()
        .filter(|f| *f != Family::KantorovichSearch)
        .collect()
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RadlabError::Config(m.to_string()));
        if self.suites.is_empty() {
            return bad("no suites selected");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return bad("tol must be a positive finite number");
        }
        if self.dims.min < 2 || self.dims.max > crate::matcore::MAX_DIM || self.dims.min > self.dims.max {
            return bad("dims must lie in 2..=64");
        }
        if self.families.is_empty() {
            return bad("at least one family is required");
        }
        if self.families.contains(&Family::KantorovichSearch) {
            return bad("kantorovich_search is not a trial family");
        }
        let g = &self.grid;
        if g.lambda.is_empty() || g.alpha.is_empty() || g.r.is_empty() {
            return bad("parameter grids must be non-empty");
        }
        if g.lambda.iter().any(|&l| l < 0.0) {
            return bad("grid lambda values must be >= 0");
        }
        if g.alpha.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            return bad("grid alpha values must lie in [0, 1]");
        }
        if g.r.iter().any(|&r| r < 1.0) {
            return bad("grid r values must be >= 1");
        }
        if self.kantorovich_budget == 0 {
            return bad("kantorovich budget must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridEcho {
    pub lambda: Vec<f64>,
    pub alpha: Vec<f64>,
    pub r: Vec<f64>,
}

impl From<&ParamGrid> for GridEcho {
    fn from(g: &ParamGrid) -> Self {
        Self {
            lambda: g.lambda.clone(),
            alpha: g.alpha.clone(),
            r: g.r.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub suites: Vec<SuiteId>,
    pub dims: DimRange,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub grid: GridEcho,
    pub families: Vec<Family>,
    pub kantorovich_budget: usize,
}

impl From<&SuiteConfig> for ConfigEcho {
    fn from(c: &SuiteConfig) -> Self {
        Self {
            suites: c.suites.iter().copied().collect(),
            dims: c.dims,
            trials: c.trials,
            seed: c.seed,
            tol: c.tol,
            grid: GridEcho::from(&c.grid),
            families: c.families.clone(),
            kantorovich_budget: c.kantorovich_budget,
        }
    }
}

/// Checks on the explicit (quadratic root) form of self-referential bounds.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExplicitStats {
    pub evaluations: u64,
    pub violations: u64,
    /// max(w − explicit bound)
    pub max_excess: Option<f64>,
    pub max_quadratic_residual: Option<f64>,
}

impl ExplicitStats {
    fn push(&mut self, w: f64, explicit: f64, residual: f64) -> bool {
        self.evaluations += 1;
        let excess = w - explicit;
        self.max_excess = Some(self.max_excess.map_or(excess, |m| m.max(excess)));
        self.max_quadratic_residual = Some(self.max_quadratic_residual.map_or(residual, |m| m.max(residual)));
        let bad = excess > EXPLICIT_ABS_TOL || !(residual <= QUADRATIC_TOL);
        if bad {
            self.violations += 1;
        }
        bad
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationReport {
    pub trial: u64,
    pub dim: usize,
    pub family: Option<Family>,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub detail: Option<String>,
    pub operands: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub id: SuiteId,
    pub kind: &'static str,
    pub trials: u64,
    pub passes: u64,
    /// Trials with at least one violating record.
    pub violations: u64,
    pub skips: u64,
    pub evaluations: u64,
    pub violating_evaluations: u64,
    pub min_slack: Option<f64>,
    pub slack_quantiles: Option<Quantiles>,
    /// Per chain link; empty for single-inequality suites.
    pub links: BTreeMap<String, LinkStats>,
    pub explicit: Option<ExplicitStats>,
    pub consistency_violations: u64,
    pub skip_reasons: BTreeMap<String, u64>,
    pub first_violation: Option<ViolationReport>,
}

/// Per trial, which selected single-operator bound gave the smallest upper
/// bound on w²(T) (best grid point per bound).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightnessEntry {
    pub bound: BoundId,
    pub wins: u64,
    pub win_rate: f64,
    /// Mean of (bound − w²)/w².
    pub mean_gap: f64,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KantorovichScanReport {
    pub dim: usize,
    pub budget: usize,
    pub candidates: usize,
    pub non_invertible: usize,
    pub hits: usize,
    pub hit_rate: f64,
    /// Largest maximal Loewner multiple seen among invertible candidates.
    pub best_m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub status: &'static str,
    pub suites: usize,
    pub trials: u64,
    pub passes: u64,
    pub violations: u64,
    pub skips: u64,
    pub explicit_violations: u64,
    pub consistency_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub version: &'static str,
    pub config: ConfigEcho,
    pub summary: Summary,
    pub suites: Vec<SuiteReport>,
    pub tightness: Vec<TightnessEntry>,
    pub kantorovich: Vec<KantorovichScanReport>,
}

impl TrialReport {
    pub fn has_violations(&self) -> bool {
        self.summary.violations > 0
            || self.summary.explicit_violations > 0
            || self.summary.consistency_violations > 0
    }

    pub fn suite(&self, id: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.id.as_str() == id)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Columns: id, kind, trials, passes, violations, skips, evaluations,
    /// min_slack, p05, p50, p95, explicit_violations. One row per suite.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "id",
            "kind",
            "trials",
            "passes",
            "violations",
            "skips",
            "evaluations",
            "min_slack",
            "p05",
            "p50",
            "p95",
            "explicit_violations",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for s in &self.suites {
            let q = s.slack_quantiles.as_ref();
            w.write_record([
                s.id.as_str().to_string(),
                s.kind.to_string(),
                s.trials.to_string(),
                s.passes.to_string(),
                s.violations.to_string(),
                s.skips.to_string(),
                s.evaluations.to_string(),
                opt(s.min_slack),
                opt(q.map(|q| q.p05)),
                opt(q.map(|q| q.p50)),
                opt(q.map(|q| q.p95)),
                s.explicit.as_ref().map_or(0, |e| e.violations).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Json => std::fs::write(path, self.to_json()?)?,
            OutputFormat::Csv => self.write_csv(std::fs::File::create(path)?)?,
        }
        Ok(())
    }
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::from_str(&m.to_json_string()).unwrap_or(Value::Null)
}

/// Skip reason for an error that signals an unmet hypothesis; `None` for
/// errors that abort the run.
fn skip_reason(e: &RadlabError) -> Option<&'static str> {
    match e {
        RadlabError::HypothesisFailed(_) => Some("hypothesis_failed"),
        RadlabError::NotInvertible { .. } => Some("not_invertible"),
        _ => None,
    }
}

struct SuiteAcc {
    id: SuiteId,
    trials: u64,
    passes: u64,
    violations: u64,
    skips: u64,
    slack: SlackAccumulator,
    explicit: Option<ExplicitStats>,
    consistency_violations: u64,
    skip_reasons: BTreeMap<String, u64>,
    first_violation: Option<ViolationReport>,
}

impl SuiteAcc {
    fn new(id: SuiteId) -> Self {
        let explicit = matches!(
            id,
            SuiteId::Bound(BoundId::Eq4Aldolat | BoundId::Th4 | BoundId::Th6)
        )
        .then(ExplicitStats::default);
        Self {
            id,
            trials: 0,
            passes: 0,
            violations: 0,
            skips: 0,
            slack: SlackAccumulator::default(),
            explicit,
            consistency_violations: 0,
            skip_reasons: BTreeMap::new(),
            first_violation: None,
        }
    }

    fn skip(&mut self, reason: &str) {
        self.trials += 1;
        self.skips += 1;
        *self.skip_reasons.entry(reason.to_string()).or_default() += 1;
    }

    fn finish(mut self) -> SuiteReport {
        let links = self
            .slack
            .links
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        SuiteReport {
            id: self.id,
            kind: self.id.kind(),
            trials: self.trials,
            passes: self.passes,
            violations: self.violations,
            skips: self.skips,
            evaluations: self.slack.evaluations(),
            violating_evaluations: self.slack.violations,
            min_slack: self.slack.min_slack,
            slack_quantiles: self.slack.quantiles(),
            links,
            explicit: self.explicit,
            consistency_violations: self.consistency_violations,
            skip_reasons: self.skip_reasons,
            first_violation: self.first_violation,
        }
    }
}

/// Lazily drawn operands of one trial.
struct TrialOperands {
    dim: usize,
    family: Family,
    seed: u64,
    index: u64,
    slots: [Option<Operator>; 4],
    real: [Option<Operator>; 2],
}

impl TrialOperands {
    fn new(dim: usize, family: Family, seed: u64, index: u64) -> Self {
        Self {
            dim,
            family,
            seed,
            index,
            slots: Default::default(),
            real: Default::default(),
        }
    }

    fn ensure(&mut self, count: usize) -> Result<()> {
        for (k, slot) in self.slots.iter_mut().enumerate().take(count) {
            if slot.is_none() {
                let seed = rng::mix(self.seed, [SLOT_T, SLOT_S, SLOT_C, SLOT_D][k]);
                *slot = Some(Operator::new(genlab::generate_one(self.family, self.dim, seed, self.index)?));
            }
        }
        Ok(())
    }

    fn ensure_real(&mut self) -> Result<()> {
        let family = if self.family.is_real() {
            self.family
        } else {
            Family::RealGinibre
        };
        for (k, slot) in self.real.iter_mut().enumerate() {
            if slot.is_none() {
                let seed = rng::mix(self.seed, [SLOT_REAL_T, SLOT_REAL_S][k]);
                *slot = Some(Operator::new(genlab::generate_one(family, self.dim, seed, self.index)?));
            }
        }
        Ok(())
    }

    fn slot(&self, k: usize) -> &Operator {
        self.slots[k].as_ref().expect("slot drawn")
    }
}

/// Evaluates `id` over its grid on operands shaped for its arity.
fn evaluate_grid(
    id: BoundId,
    ops: &mut TrialOperands,
    cert_operand: Option<&(Operator, KantorovichCert)>,
    grid: &ParamGrid,
) -> Result<(Vec<BoundEval>, Vec<Value>)> {
    let points = id.grid_points(grid);
    let mut out = Vec::new();
    let operands: Vec<Value>;
    match id.arity() {
        Arity::Single | Arity::Pair | Arity::Quad => {
            let count = id.arity().operands();
            ops.ensure(count)?;
            let t = ops.slot(0);
            let pair = if count >= 2 { Some(OperatorPair::new(t, ops.slot(1))?) } else { None };
            let quad = if count == 4 {
                Some(OperatorQuad::new(t, ops.slot(1), ops.slot(2), ops.slot(3))?)
            } else {
                None
            };
            let operands_ref = Operands {
                t,
                pair: pair.as_ref(),
                quad: quad.as_ref(),
                real_pair: None,
                cert: None,
            };
            for p in &points {
                out.extend(bounds::evaluate(id, &operands_ref, p)?);
            }
            operands = (0..count).map(|k| matrix_value(ops.slot(k).matrix())).collect();
        }
        Arity::RealPair => {
            ops.ensure_real()?;
            let (t, s) = (
                ops.real[0].as_ref().expect("drawn"),
                ops.real[1].as_ref().expect("drawn"),
            );
            let pair = OperatorPair::new(t, s)?;
            let operands_ref = Operands {
                real_pair: Some(&pair),
                ..Operands::single(t)
            };
            for p in &points {
                out.extend(bounds::evaluate(id, &operands_ref, p)?);
            }
            operands = vec![matrix_value(t.matrix()), matrix_value(s.matrix())];
        }
        Arity::Certified => {
            let (t, cert) = cert_operand.expect("caller supplies certified operands");
            let operands_ref = Operands {
                cert: Some(cert),
                ..Operands::single(t)
            };
            for p in &points {
                out.extend(bounds::evaluate(id, &operands_ref, p)?);
            }
            operands = vec![matrix_value(t.matrix())];
        }
    }
    Ok((out, operands))
}

fn record_link(params: &BTreeMap<String, f64>) -> Option<u32> {
    params.get("link").map(|&l| l as u32)
}

fn push_bound_records(
    acc: &mut SuiteAcc,
    records: &[BoundEval],
    operands: Vec<Value>,
    tol: f64,
    trial: u64,
    dim: usize,
    family: Option<Family>,
) {
    let mut first: Option<(&BoundEval, Option<String>)> = None;
    for e in records {
        let violation = e.is_violation(tol);
        acc.slack.push(e.slack, violation, record_link(&e.params));
        let mut detail = None;
        if let (Some(stats), Some(explicit)) = (acc.explicit.as_mut(), e.explicit_bound) {
            let w = e.certificates.get("w").and_then(Value::as_f64).unwrap_or(f64::NAN);
            let residual = e
                .certificates
                .get("quadratic_residual")
                .and_then(Value::as_f64)
                .unwrap_or(f64::NAN);
            if stats.push(w, explicit, residual) {
                detail = Some(format!("explicit bound {explicit} vs w {w}, quadratic residual {residual}"));
            }
        }
        if let Some(gap) = e.certificates.get("r1_gap").and_then(Value::as_f64) {
            if !(gap <= R1_GAP_TOL * e.rhs.abs().max(1.0)) {
                acc.consistency_violations += 1;
                detail = Some(format!("r = 1 instance differs from the general formula by {gap}"));
            }
        }
        if (violation || detail.is_some()) && first.is_none() {
            first = Some((e, detail));
        }
    }
    match first {
        Some((e, detail)) => {
            acc.violations += 1;
            if acc.first_violation.is_none() {
                acc.first_violation = Some(ViolationReport {
                    trial,
                    dim,
                    family,
                    params: e.params.clone(),
                    lhs: e.lhs,
                    rhs: e.rhs,
                    slack: e.slack,
                    detail,
                    operands,
                });
            }
        }
        None => acc.passes += 1,
    }
    acc.trials += 1;
}

fn push_lemma_records(acc: &mut SuiteAcc, records: &[LemmaRecord], tol: f64, trial: u64, dim: usize) {
    let mut first = None;
    for r in records {
        let violation = r.is_violation(tol);
        let link = r.params.iter().find(|(k, _)| *k == "link").map(|&(_, v)| v as u32);
        acc.slack.push(r.slack, violation, link);
        if violation && first.is_none() {
            first = Some(r);
        }
    }
    acc.trials += 1;
    match first {
        Some(r) => {
            acc.violations += 1;
            if acc.first_violation.is_none() {
                acc.first_violation = Some(ViolationReport {
                    trial,
                    dim,
                    family: None,
                    params: r.params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
                    lhs: r.lhs,
                    rhs: r.rhs,
                    slack: r.slack,
                    detail: Some("inputs are regenerated from (seed, lemma id, trial)".into()),
                    operands: Vec::new(),
                });
            }
        }
        None => acc.passes += 1,
    }
}

#[derive(Default)]
struct TightnessAcc {
    wins: u64,
    gap_sum: f64,
    trials: u64,
}

/// Smallest implied bound on w² per selected single-operator bound.
fn tightness_candidates(records: &[(BoundId, Vec<BoundEval>)]) -> Vec<(BoundId, f64)> {
    let mut best: BTreeMap<BoundId, f64> = BTreeMap::new();
    for (id, evals) in records {
        for e in evals {
            if let Some(v) = compare::implied_w_bound(e) {
                let v2 = v * v;
                best.entry(*id).and_modify(|b| *b = b.min(v2)).or_insert(v2);
            }
        }
    }
    best.into_iter().collect()
}

/// Runs every selected suite on `cfg.trials` trials.
pub fn run_verify(cfg: &SuiteConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let dims = cfg.dims.dims();
    let nd = dims.len() as u64;
    let nf = cfg.families.len() as u64;

    let needs_certified = cfg
        .suites
        .iter()
        .any(|s| matches!(s, SuiteId::Bound(b) if b.arity() == Arity::Certified));
    let mut kantorovich = Vec::new();
    let mut certified: BTreeMap<usize, Vec<(Operator, KantorovichCert)>> = BTreeMap::new();
    if needs_certified {
        for &dim in &dims {
            let scan = genlab::kantorovich_scan(dim, rng::mix(cfg.seed, SLOT_KANTOROVICH), cfg.kantorovich_budget)?;
            kantorovich.push(KantorovichScanReport {
                dim,
                budget: cfg.kantorovich_budget,
                candidates: scan.candidates,
                non_invertible: scan.non_invertible,
                hits: scan.hits.len(),
                hit_rate: scan.hit_rate(),
                best_m: scan.best_m.is_finite().then_some(scan.best_m),
            });
            certified.insert(
                dim,
                scan.hits.into_iter().map(|(t, c)| (Operator::new(t), c)).collect(),
            );
        }
    }

    let mut accs: Vec<SuiteAcc> = cfg.suites.iter().map(|&id| SuiteAcc::new(id)).collect();
    let mut tight: BTreeMap<BoundId, TightnessAcc> = BTreeMap::new();

    for i in 0..cfg.trials {
        let dim = dims[(i % nd) as usize];
        let family = cfg.families[((i / nd) % nf) as usize];
        let mut ops = TrialOperands::new(dim, family, cfg.seed, i);
        let mut single_records: Vec<(BoundId, Vec<BoundEval>)> = Vec::new();

        for acc in accs.iter_mut() {
            match acc.id {
                SuiteId::Bound(id) => {
                    let cert_operand = if id.arity() == Arity::Certified {
                        let hits = &certified[&dim];
                        if hits.is_empty() {
                            acc.skip("no_certified_operand");
                            continue;
                        }
                        Some(&hits[((i / nd) % hits.len() as u64) as usize])
                    } else {
                        None
                    };
                    match evaluate_grid(id, &mut ops, cert_operand, &cfg.grid) {
                        Ok((records, operands)) => {
                            let fam = (id.arity() != Arity::Certified).then_some(family);
                            push_bound_records(acc, &records, operands, cfg.tol, i, dim, fam);
                            if compare::SINGLE_OPERATOR_BOUNDS.contains(&id) {
                                single_records.push((id, records));
                            }
                        }
                        Err(e) => match skip_reason(&e) {
                            Some(reason) => acc.skip(reason),
                            None => return Err(e),
                        },
                    }
                }
                SuiteId::Lemma(id) => {
                    let records = lemma_suite::lemma_trial(id, dim, cfg.seed, i, &cfg.grid)?;
                    push_lemma_records(acc, &records, cfg.tol, i, dim);
                }
            }
        }

        let cands = tightness_candidates(&single_records);
        if !cands.is_empty() {
            ops.ensure(1)?;
            let w = ops.slot(0).w()?;
            let w2 = w * w;
            let best = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            for (id, v) in cands {
                let t = tight.entry(id).or_default();
                t.trials += 1;
                if v <= best + compare::TIE_REL * best.abs() {
                    t.wins += 1;
                }
                if w2 > 0.0 {
                    t.gap_sum += (v - w2) / w2;
                }
            }
        }
    }

    let suites: Vec<SuiteReport> = accs.into_iter().map(SuiteAcc::finish).collect();
    let summary = Summary {
        status: "pass",
        suites: suites.len(),
        trials: cfg.trials,
        passes: suites.iter().map(|s| s.passes).sum(),
        violations: suites.iter().map(|s| s.violations).sum(),
        skips: suites.iter().map(|s| s.skips).sum(),
        explicit_violations: suites
            .iter()
            .filter_map(|s| s.explicit.as_ref())
            .map(|e| e.violations)
            .sum(),
        consistency_violations: suites.iter().map(|s| s.consistency_violations).sum(),
    };
    let tightness = tight
        .into_iter()
        .map(|(bound, t)| TightnessEntry {
            bound,
            wins: t.wins,
            win_rate: t.wins as f64 / t.trials.max(1) as f64,
            mean_gap: t.gap_sum / t.trials.max(1) as f64,
            trials: t.trials,
        })
        .collect();
    let mut report = TrialReport {
        version: REPORT_VERSION,
        config: ConfigEcho::from(cfg),
        summary,
        suites,
        tightness,
        kantorovich,
    };
    if report.has_violations() {
        report.summary.status = "violation";
    }
    Ok(report)
}

/// w(T) and ‖T‖ of the operand plotted by [`run_fov`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FovSummary {
    pub w: f64,
    pub norm: f64,
    pub points: usize,
}

/// Writes `k` field-of-values boundary samples of the matrix at
/// `matrix_path` as CSV (`theta,re,im`), then a final `radius,<w>,<‖T‖>` row.
pub fn run_fov(matrix_path: &Path, k: usize, out_path: &Path) -> Result<FovSummary> {
    let t = ComplexMatrix::read_json(matrix_path)?;
    let points = crate::numrad::fov_boundary(&t, k)?;
    let w = crate::numrad::numerical_radius_value(&t)?;
    let norm = crate::matcore::op_norm(&t)?;
    let file = std::fs::File::create(out_path)?;
    let mut writer = crate::numrad::write_fov_csv(&points, file)?;
    writer.write_record(["radius".to_string(), format!("{w:.17e}"), format!("{norm:.17e}")])?;
    writer.flush()?;
    Ok(FovSummary {
        w,
        norm,
        points: points.len(),
    })
}
