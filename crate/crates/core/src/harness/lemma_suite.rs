//! Random trials for the lemma checkers.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::bounds::ParamGrid;
use crate::error::{RadlabError, Result};
use crate::genlab::{generate_one, Family};
use crate::lemmas::{self, ChainCheck, ConvexPowerFn, LemmaCheck, ScalarPair, VectorTriple};
use crate::matcore::{vec_norm, CVector, HermitianMatrix, C64};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaId {
    Young,
    KantorovichYoung,
    Buzano,
    Cauchyimp,
    GenBuzano,
    GenBuzanoChain,
    Dolat23,
    ExtBuzano,
    ImpTriangle,
    Polarization,
    AppImpTriangle,
    Mccarthy,
    ConvexOpNorm,
    MixedSchwarz,
    JensenOp,
    ConvexScalar,
}

impl LemmaId {
    pub const ALL: [LemmaId; 16] = [
        LemmaId::Young,
        LemmaId::KantorovichYoung,
        LemmaId::Buzano,
        LemmaId::Cauchyimp,
        LemmaId::GenBuzano,
        LemmaId::GenBuzanoChain,
        LemmaId::Dolat23,
        LemmaId::ExtBuzano,
        LemmaId::ImpTriangle,
        LemmaId::Polarization,
        LemmaId::AppImpTriangle,
        LemmaId::Mccarthy,
        LemmaId::ConvexOpNorm,
        LemmaId::MixedSchwarz,
        LemmaId::JensenOp,
        LemmaId::ConvexScalar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::Young => "young",
            LemmaId::KantorovichYoung => "kantorovich_young",
            LemmaId::Buzano => "buzano",
            LemmaId::Cauchyimp => "cauchyimp",
            LemmaId::GenBuzano => "gen_buzano",
            LemmaId::GenBuzanoChain => "gen_buzano_chain",
            LemmaId::Dolat23 => "dolat23",
            LemmaId::ExtBuzano => "ext_buzano",
            LemmaId::ImpTriangle => "imp_triangle",
            LemmaId::Polarization => "polarization",
            LemmaId::AppImpTriangle => "app_imp_triangle",
            LemmaId::Mccarthy => "mccarthy",
            LemmaId::ConvexOpNorm => "convex_op_norm",
            LemmaId::MixedSchwarz => "mixed_schwarz",
            LemmaId::JensenOp => "jensen_op",
            LemmaId::ConvexScalar => "convex_scalar",
        }
    }

    /// Tolerance each checker is held to in isolation (relative to
    /// max(1, |rhs|)).
    pub fn stated_tol(self) -> f64 {
        match self {
            LemmaId::ConvexOpNorm | LemmaId::MixedSchwarz => 1e-10,
            LemmaId::ConvexScalar => 1e-15,
            _ => 1e-12,
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = RadlabError;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| RadlabError::Config(format!("unknown lemma id '{s}'")))
    }
}

impl Serialize for LemmaId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One inequality instance from a lemma trial.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub params: Vec<(&'static str, f64)>,
}

impl LemmaRecord {
    fn from_check(c: LemmaCheck, params: Vec<(&'static str, f64)>) -> Self {
        Self {
            lhs: c.lhs,
            rhs: c.rhs,
            slack: c.slack,
            params,
        }
    }

    fn from_chain(c: ChainCheck, params: Vec<(&'static str, f64)>) -> [Self; 2] {
        let mut second = params.clone();
        second.push(("link", 1.0));
        let mut first = params;
        first.push(("link", 0.0));
        [
            Self::from_check(LemmaCheck::new(c.lhs, c.middle), first),
            Self::from_check(LemmaCheck::new(c.middle, c.outer), second),
        ]
    }

    pub fn is_violation(&self, tol: f64) -> bool {
        self.slack < -tol * self.rhs.abs().max(1.0)
    }
}

/// Vector with components uniform in the complex unit disk.
pub fn disk_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    DVector::from_fn(n, |_, _| {
        let radius: f64 = rng.random::<f64>().sqrt();
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        C64::from_polar(radius, angle)
    })
}

/// Vector with components uniform in [−1, 1].
pub fn real_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    DVector::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..=1.0), 0.0))
}

pub fn unit_disk_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    loop {
        let e = disk_vector(n, rng);
        let norm = vec_norm(&e);
        if norm > 1e-3 {
            return e.unscale(norm);
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.random_range(-2.0..=2.0))
}

fn psd_operand(dim: usize, seed: u64, slot: u64, index: u64) -> Result<HermitianMatrix> {
    HermitianMatrix::new(generate_one(Family::Psd, dim, rng::mix(seed, slot), index)?)
}

/// Runs one trial of `id`: draws inputs for (seed, trial) and evaluates the
/// checker at every applicable grid point.
pub fn lemma_trial(
    id: LemmaId,
    dim: usize,
    seed: u64,
    trial: u64,
    grid: &ParamGrid,
) -> Result<Vec<LemmaRecord>> {
    let mut rng = rng::stream(seed, rng::tag(id.as_str()), trial);
    let mut out = Vec::new();
    let unit_lambdas: Vec<f64> = grid.lambda.iter().copied().filter(|l| *l <= 1.0).collect();
    match id {
        LemmaId::Young | LemmaId::KantorovichYoung => {
            let p = ScalarPair::new(log_uniform(&mut rng), log_uniform(&mut rng), rng.random())?;
            let check = if id == LemmaId::Young {
                lemmas::check_young(&p)
            } else {
                lemmas::check_kantorovich_young(&p)?
            };
            out.push(LemmaRecord::from_check(check, vec![("t", p.t())]));
        }
        LemmaId::Buzano
        | LemmaId::GenBuzano
        | LemmaId::GenBuzanoChain
        | LemmaId::Dolat23
        | LemmaId::ExtBuzano => {
            let x = disk_vector(dim, &mut rng);
            let y = disk_vector(dim, &mut rng);
            let e = unit_disk_vector(dim, &mut rng);
            let v = VectorTriple::new(x, y, e)?;
            match id {
                LemmaId::Buzano => out.push(LemmaRecord::from_check(lemmas::check_buzano(&v), vec![])),
                LemmaId::GenBuzano => {
                    for &l in &grid.lambda {
                        out.push(LemmaRecord::from_check(
                            lemmas::check_gen_buzano(&v, l)?,
                            vec![("lambda", l)],
                        ));
                    }
                }
                LemmaId::GenBuzanoChain => {
                    for &l in &grid.lambda {
                        let c = lemmas::check_gen_buzano_chain(&v, l)?;
                        let p = || vec![("lambda", l)];
                        let link = |k: f64| {
                            let mut v = p();
                            v.push(("link", k));
                            v
                        };
                        out.push(LemmaRecord::from_check(LemmaCheck::new(c.lhs, c.buzano_squared), link(0.0)));
                        out.push(LemmaRecord::from_check(
                            LemmaCheck::new(c.buzano_squared, c.composed),
                            link(1.0),
                        ));
                        out.push(LemmaRecord::from_check(LemmaCheck::new(c.stated, c.composed), link(2.0)));
                    }
                }
                LemmaId::Dolat23 => {
                    for &a in &grid.alpha {
                        for &r in &grid.r {
                            out.push(LemmaRecord::from_check(
                                lemmas::check_dolat23(&v, a, r)?,
                                vec![("alpha", a), ("r", r)],
                            ));
                        }
                    }
                }
                _ => {
                    for &l in &unit_lambdas {
                        for &r in &grid.r {
                            out.push(LemmaRecord::from_check(
                                lemmas::check_ext_buzano(&v, l, r)?,
                                vec![("lambda", l), ("r", r)],
                            ));
                        }
                    }
                }
            }
        }
        LemmaId::Cauchyimp | LemmaId::ImpTriangle => {
            let x = disk_vector(dim, &mut rng);
            let y = disk_vector(dim, &mut rng);
            for &l in &grid.lambda {
                let c = if id == LemmaId::Cauchyimp {
                    lemmas::check_cauchyimp(&x, &y, l)?
                } else {
                    lemmas::check_imp_triangle(&x, &y, l)?
                };
                out.extend(LemmaRecord::from_chain(c, vec![("lambda", l)]));
            }
        }
        LemmaId::Polarization => {
            let x = real_vector(dim, &mut rng);
            let y = real_vector(dim, &mut rng);
            let residual = lemmas::check_polarization(&x, &y)?;
            // held to the residual scale (‖x‖+‖y‖)²
            let scale = lemmas::polarization_scale(&x, &y);
            out.push(LemmaRecord {
                lhs: residual / scale,
                rhs: 0.0,
                slack: -residual / scale,
                params: vec![],
            });
        }
        LemmaId::AppImpTriangle => {
            let x = real_vector(dim, &mut rng);
            let y = real_vector(dim, &mut rng);
            for &l in &grid.lambda {
                out.push(LemmaRecord::from_check(
                    lemmas::check_app_imp_triangle(&x, &y, l)?,
                    vec![("lambda", l)],
                ));
            }
        }
        LemmaId::Mccarthy | LemmaId::JensenOp => {
            let m = psd_operand(dim, seed, rng::tag(id.as_str()), trial)?;
            let x = unit_disk_vector(dim, &mut rng);
            for &r in &grid.r {
                let check = if id == LemmaId::Mccarthy {
                    lemmas::check_mccarthy(&m, &x, r)?
                } else {
                    lemmas::check_jensen_op(&m, &x, ConvexPowerFn::new(r)?)?
                };
                out.push(LemmaRecord::from_check(check, vec![("r", r)]));
            }
        }
        LemmaId::ConvexOpNorm => {
            let a = psd_operand(dim, seed, 1, trial)?;
            let b = psd_operand(dim, seed, 2, trial)?;
            for &r in &grid.r {
                out.push(LemmaRecord::from_check(
                    lemmas::check_convex_op_norm(&a, &b, r)?,
                    vec![("r", r)],
                ));
            }
        }
        LemmaId::MixedSchwarz => {
            let t = generate_one(Family::Ginibre, dim, rng::mix(seed, 3), trial)?;
            let x = disk_vector(dim, &mut rng);
            let y = disk_vector(dim, &mut rng);
            out.push(LemmaRecord::from_check(lemmas::check_mixed_schwarz(&t, &x, &y)?, vec![]));
        }
        LemmaId::ConvexScalar => {
            let x = log_uniform(&mut rng);
            let alpha: f64 = rng.random();
            for &r in &grid.r {
                out.push(LemmaRecord::from_check(
                    lemmas::check_convex_scalar(ConvexPowerFn::new(r)?, x, alpha)?,
                    vec![("alpha", alpha), ("r", r)],
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in LemmaId::ALL {
            assert_eq!(id.as_str().parse::<LemmaId>().unwrap(), id);
        }
    }

    #[test]
    fn trials_are_reproducible_and_pass() {
        let grid = ParamGrid::default();
        for id in LemmaId::ALL {
            for trial in 0..20 {
                let a = lemma_trial(id, 2 + (trial as usize % 7), 5, trial, &grid).unwrap();
                let b = lemma_trial(id, 2 + (trial as usize % 7), 5, trial, &grid).unwrap();
                assert_eq!(a, b);
                assert!(!a.is_empty());
                for rec in &a {
                    assert!(!rec.is_violation(id.stated_tol()), "{id}: {rec:?}");
                }
            }
        }
    }
}
