//! Catalog of numerical radius upper bounds as evaluatable records.
//!
//! Each evaluator returns one or more [`BoundEval`]s with both sides of the
//! inequality. Bounds whose right side contains the bounded quantity
//! (Al-Dolat, the α-family and the product bound with λ) also carry the
//! positive root of their defining quadratic as `explicit_bound`.
//! Multi-step chains are emitted as one record per link, tagged with a
//! `link` parameter.

use std::cell::{OnceCell, RefCell};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{domain, RadlabError, Result};
use crate::genlab::{self, CertDirection, KantorovichCert};
use crate::lemmas::kantorovich_ratio;
use crate::matcore::{ComplexMatrix, HermitianMatrix, PsdSpectrum};
use crate::numrad;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    Eq1Lower,
    Eq1Upper,
    Eq2Kittaneh,
    ElhaddadKittaneh,
    Eq3AbuOmar,
    Eq11Bhunia,
    Dragomir,
    Eq4Aldolat,
    Th2,
    Th2Chain,
    Th4,
    Th6,
    Th6Cor1,
    Th6Cor2,
    Th5,
    Th5Cor,
    PolarizationProp,
    KantTh1Cor,
    KantProp,
}

/// Operand shape a bound consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Single,
    Pair,
    Quad,
    RealPair,
    /// A single invertible operand with a Loewner-order certificate.
    Certified,
}

impl Arity {
    /// Number of operator operands.
    pub fn operands(self) -> usize {
        match self {
            Arity::Single | Arity::Certified => 1,
            Arity::Pair | Arity::RealPair => 2,
            Arity::Quad => 4,
        }
    }
}

impl BoundId {
    pub const ALL: [BoundId; 19] = [
        BoundId::Eq1Lower,
        BoundId::Eq1Upper,
        BoundId::Eq2Kittaneh,
        BoundId::ElhaddadKittaneh,
        BoundId::Eq3AbuOmar,
        BoundId::Eq11Bhunia,
        BoundId::Dragomir,
        BoundId::Eq4Aldolat,
        BoundId::Th2,
        BoundId::Th2Chain,
        BoundId::Th4,
        BoundId::Th6,
        BoundId::Th6Cor1,
        BoundId::Th6Cor2,
        BoundId::Th5,
        BoundId::Th5Cor,
        BoundId::PolarizationProp,
        BoundId::KantTh1Cor,
        BoundId::KantProp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Eq1Lower => "eq1_lower",
            BoundId::Eq1Upper => "eq1_upper",
            BoundId::Eq2Kittaneh => "eq2_kittaneh",
            BoundId::ElhaddadKittaneh => "elhaddad_kittaneh",
            BoundId::Eq3AbuOmar => "eq3_abu_omar",
            BoundId::Eq11Bhunia => "eq11_bhunia",
            BoundId::Dragomir => "dragomir",
            BoundId::Eq4Aldolat => "eq4_aldolat",
            BoundId::Th2 => "th2",
            BoundId::Th2Chain => "th2_chain",
            BoundId::Th4 => "th4",
            BoundId::Th6 => "th6",
            BoundId::Th6Cor1 => "th6_cor1",
            BoundId::Th6Cor2 => "th6_cor2",
            BoundId::Th5 => "th5",
            BoundId::Th5Cor => "th5_cor",
            BoundId::PolarizationProp => "polarization_prop",
            BoundId::KantTh1Cor => "kant_th1_cor",
            BoundId::KantProp => "kant_prop",
        }
    }

    pub fn arity(self) -> Arity {
        use BoundId::*;
        match self {
            Eq1Lower | Eq1Upper | Eq2Kittaneh | ElhaddadKittaneh | Eq3AbuOmar | Eq11Bhunia
            | Th2 | Th2Chain | Th4 => Arity::Single,
            Dragomir | Eq4Aldolat | Th6 | Th6Cor1 | Th6Cor2 => Arity::Pair,
            Th5 | Th5Cor => Arity::Quad,
            PolarizationProp => Arity::RealPair,
            KantTh1Cor | KantProp => Arity::Certified,
        }
    }

    pub fn uses_r(self) -> bool {
        use BoundId::*;
        matches!(
            self,
            ElhaddadKittaneh | Dragomir | Th4 | Th6 | Th6Cor2 | Th5 | Th5Cor | KantTh1Cor
        )
    }

    pub fn uses_lambda(self) -> bool {
        use BoundId::*;
        matches!(
            self,
            Eq4Aldolat | Th2 | Th2Chain | Th6 | Th6Cor1 | Th6Cor2 | PolarizationProp | KantProp
        )
    }

    pub fn uses_alpha(self) -> bool {
        self == BoundId::Th4
    }

    /// Smallest admissible r.
    pub fn min_r(self) -> f64 {
        if self == BoundId::Th5Cor {
            2.0
        } else {
            1.0
        }
    }

    /// Largest admissible λ.
    pub fn max_lambda(self) -> f64 {
        if self == BoundId::KantProp {
            1.0
        } else {
            f64::INFINITY
        }
    }

    /// Parameter combinations from the grid that this bound accepts.
    /// Unused knobs are pinned to the first grid value so every bound gets
    /// at least one combination (when its own ranges are satisfiable).
    pub fn grid_points(self, grid: &ParamGrid) -> Vec<BoundParams> {
        let r_values: Vec<f64> = if self.uses_r() {
            grid.r.iter().copied().filter(|&r| r >= self.min_r()).collect()
        } else {
            vec![1.0]
        };
        let lambdas: Vec<f64> = if self.uses_lambda() {
            grid.lambda
                .iter()
                .copied()
                .filter(|&l| l >= 0.0 && l <= self.max_lambda())
                .collect()
        } else {
            vec![0.0]
        };
        let alphas: Vec<f64> = if self.uses_alpha() {
            grid.alpha.clone()
        } else {
            vec![0.0]
        };
        let mut out = Vec::new();
        for &r in &r_values {
            for &lambda in &lambdas {
                for &alpha in &alphas {
                    out.push(BoundParams { r, lambda, alpha });
                }
            }
        }
        out
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = RadlabError;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .iter()
            .copied()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| RadlabError::Config(format!("unknown bound id '{s}'")))
    }
}

impl Serialize for BoundId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub r: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            lambda: 0.0,
            alpha: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrid {
    pub lambda: Vec<f64>,
    pub alpha: Vec<f64>,
    pub r: Vec<f64>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            lambda: vec![0.0, 0.5, 1.0, 2.0, 10.0],
            alpha: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            r: vec![1.0, 1.5, 2.0, 3.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEval {
    pub bound_id: BoundId,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub explicit_bound: Option<f64>,
    pub hypothesis_ok: bool,
    pub certificates: BTreeMap<String, Value>,
}

impl BoundEval {
    fn new(bound_id: BoundId, lhs: f64, rhs: f64) -> Self {
        Self {
            bound_id,
            params: BTreeMap::new(),
            lhs,
            rhs,
            slack: rhs - lhs,
            explicit_bound: None,
            hypothesis_ok: true,
            certificates: BTreeMap::new(),
        }
    }

    fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn cert(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.certificates.insert(name.to_string(), value.into());
        self
    }

    fn link(self, k: u32) -> Self {
        self.param("link", k as f64)
    }

    /// slack < −tol·max(1, |rhs|)
    pub fn is_violation(&self, tol: f64) -> bool {
        self.slack < -tol * self.rhs.abs().max(1.0)
    }
}

fn check_r(r: f64, min: f64) -> Result<()> {
    if !(r >= min) || !r.is_finite() {
        return Err(domain(format!("r must be a finite value >= {min}, got {r}")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be a finite value >= 0, got {lambda}")));
    }
    Ok(())
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// An operand with lazily computed, memoized spectral quantities.
pub struct Operator {
    t: ComplexMatrix,
    gram: OnceCell<PsdSpectrum>,
    cogram: OnceCell<PsdSpectrum>,
    w: OnceCell<f64>,
    norm: OnceCell<f64>,
    w_square: OnceCell<f64>,
    w_abs_product: OnceCell<f64>,
    abs_powers: RefCell<Vec<(f64, HermitianMatrix)>>,
    abs_star_powers: RefCell<Vec<(f64, HermitianMatrix)>>,
    w_mixed: RefCell<Vec<(f64, f64)>>,
}

fn memo<T: Clone>(cache: &RefCell<Vec<(f64, T)>>, key: f64, f: impl FnOnce() -> Result<T>) -> Result<T> {
    if let Some((_, v)) = cache.borrow().iter().find(|(k, _)| *k == key) {
        return Ok(v.clone());
    }
    let v = f()?;
    cache.borrow_mut().push((key, v.clone()));
    Ok(v)
}

fn once<T: Clone>(cell: &OnceCell<T>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    if let Some(v) = cell.get() {
        return Ok(v.clone());
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v).clone())
}

fn product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ComplexMatrix> {
    a.matrix().matmul(b.matrix())
}

impl Operator {
    pub fn new(t: ComplexMatrix) -> Self {
        Self {
            t,
            gram: OnceCell::new(),
            cogram: OnceCell::new(),
            w: OnceCell::new(),
            norm: OnceCell::new(),
            w_square: OnceCell::new(),
            w_abs_product: OnceCell::new(),
            abs_powers: RefCell::new(Vec::new()),
            abs_star_powers: RefCell::new(Vec::new()),
            w_mixed: RefCell::new(Vec::new()),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.t
    }

    fn gram(&self) -> Result<&PsdSpectrum> {
        if self.gram.get().is_none() {
            let s = PsdSpectrum::new(&self.t.gram())?;
            let _ = self.gram.set(s);
        }
        Ok(self.gram.get().expect("initialized above"))
    }

    fn cogram(&self) -> Result<&PsdSpectrum> {
        if self.cogram.get().is_none() {
            let s = PsdSpectrum::new(&self.t.cogram())?;
            let _ = self.cogram.set(s);
        }
        Ok(self.cogram.get().expect("initialized above"))
    }

    /// w(T)
    pub fn w(&self) -> Result<f64> {
        once(&self.w, || numrad::numerical_radius_value(&self.t))
    }

    /// ‖T‖
    pub fn norm(&self) -> Result<f64> {
        once(&self.norm, || {
            let top = self.gram()?.values().first().copied().unwrap_or(0.0);
            Ok(top.max(0.0).sqrt())
        })
    }

    /// w(T²)
    pub fn w_square(&self) -> Result<f64> {
        once(&self.w_square, || {
            numrad::numerical_radius_value(&self.t.matmul(&self.t)?)
        })
    }

    /// |T|^p = (T*T)^{p/2}
    pub fn abs_power(&self, p: f64) -> Result<HermitianMatrix> {
        memo(&self.abs_powers, p, || self.gram()?.power(p / 2.0))
    }

    /// |T*|^p = (TT*)^{p/2}
    pub fn abs_star_power(&self, p: f64) -> Result<HermitianMatrix> {
        memo(&self.abs_star_powers, p, || self.cogram()?.power(p / 2.0))
    }

    /// ‖|T|^p + |T*|^p‖
    pub fn sum_norm(&self, p: f64) -> Result<f64> {
        self.abs_power(p)?.add(&self.abs_star_power(p)?)?.norm()
    }

    /// w(|T||T*|)
    pub fn w_abs_product(&self) -> Result<f64> {
        once(&self.w_abs_product, || {
            numrad::numerical_radius_value(&product(
                &self.abs_power(1.0)?,
                &self.abs_star_power(1.0)?,
            )?)
        })
    }

    /// w(|T*|^{2r}|T|^{2r})
    pub fn w_mixed(&self, r: f64) -> Result<f64> {
        memo(&self.w_mixed, r, || {
            numrad::numerical_radius_value(&product(
                &self.abs_star_power(2.0 * r)?,
                &self.abs_power(2.0 * r)?,
            )?)
        })
    }
}

/// Two operands T, S with memoized cross quantities.
pub struct OperatorPair<'a> {
    t: &'a Operator,
    s: &'a Operator,
    w_s_star_t: OnceCell<f64>,
    w_t_star_s: OnceCell<f64>,
    w_cross: RefCell<Vec<(f64, f64)>>,
}

impl<'a> OperatorPair<'a> {
    pub fn new(t: &'a Operator, s: &'a Operator) -> Result<Self> {
        t.t.check_same_dim(&s.t)?;
        Ok(Self {
            t,
            s,
            w_s_star_t: OnceCell::new(),
            w_t_star_s: OnceCell::new(),
            w_cross: RefCell::new(Vec::new()),
        })
    }

    pub fn t(&self) -> &Operator {
        self.t
    }

    pub fn s(&self) -> &Operator {
        self.s
    }

    /// w(S*T)
    pub fn w_s_star_t(&self) -> Result<f64> {
        once(&self.w_s_star_t, || {
            numrad::numerical_radius_value(&self.s.t.adjoint().matmul(&self.t.t)?)
        })
    }

    /// w(T*S)
    pub fn w_t_star_s(&self) -> Result<f64> {
        once(&self.w_t_star_s, || {
            numrad::numerical_radius_value(&self.t.t.adjoint().matmul(&self.s.t)?)
        })
    }

    /// ‖|T|^p + |S|^p‖
    pub fn sum_norm(&self, p: f64) -> Result<f64> {
        self.t.abs_power(p)?.add(&self.s.abs_power(p)?)?.norm()
    }

    /// w(|S|^{2r}|T|^{2r})
    pub fn w_cross(&self, r: f64) -> Result<f64> {
        memo(&self.w_cross, r, || {
            numrad::numerical_radius_value(&product(
                &self.s.abs_power(2.0 * r)?,
                &self.t.abs_power(2.0 * r)?,
            )?)
        })
    }
}

/// Positive root of u² = a·u + b (a, b ≥ 0) and its relative residual.
fn quadratic_root(a: f64, b: f64) -> (f64, f64) {
    let u = 0.5 * (a + (a * a + 4.0 * b).sqrt());
    let scale = (u * u).max(a * u).max(b);
    let residual = if scale > 0.0 {
        (u * u - a * u - b).abs() / scale
    } else {
        0.0
    };
    (u, residual)
}

/// ‖T‖/2 ≤ w(T) and w(T) ≤ ‖T‖.
pub fn eval_eq1(op: &Operator) -> Result<[BoundEval; 2]> {
    let (w, norm) = (op.w()?, op.norm()?);
    Ok([
        BoundEval::new(BoundId::Eq1Lower, 0.5 * norm, w),
        BoundEval::new(BoundId::Eq1Upper, w, norm),
    ])
}

/// w(T) ≤ ½‖|T| + |T*|‖
pub fn eval_kittaneh(op: &Operator) -> Result<BoundEval> {
    Ok(BoundEval::new(BoundId::Eq2Kittaneh, op.w()?, 0.5 * op.sum_norm(1.0)?))
}

/// w^{2r}(T) ≤ ½‖|T|^{2r} + |T*|^{2r}‖
pub fn eval_elhaddad_kittaneh(op: &Operator, r: f64) -> Result<BoundEval> {
    check_r(r, 1.0)?;
    Ok(BoundEval::new(
        BoundId::ElhaddadKittaneh,
        op.w()?.powf(2.0 * r),
        0.5 * op.sum_norm(2.0 * r)?,
    )
    .param("r", r))
}

/// w²(T) ≤ ¼‖|T|² + |T*|²‖ + ½w(T²)
pub fn eval_abu_omar(op: &Operator) -> Result<BoundEval> {
    let w = op.w()?;
    let rhs = 0.25 * op.sum_norm(2.0)? + 0.5 * op.w_square()?;
    Ok(BoundEval::new(BoundId::Eq3AbuOmar, w * w, rhs))
}

/// w²(T) ≤ ¼‖|T|² + |T*|²‖ + ½w(|T||T*|)
pub fn eval_bhunia(op: &Operator) -> Result<BoundEval> {
    let w = op.w()?;
    let rhs = 0.25 * op.sum_norm(2.0)? + 0.5 * op.w_abs_product()?;
    Ok(BoundEval::new(BoundId::Eq11Bhunia, w * w, rhs))
}

/// w^r(S*T) ≤ ½‖|T|^{2r} + |S|^{2r}‖
pub fn eval_dragomir(pair: &OperatorPair, r: f64) -> Result<BoundEval> {
    check_r(r, 1.0)?;
    Ok(BoundEval::new(
        BoundId::Dragomir,
        pair.w_s_star_t()?.powf(r),
        0.5 * pair.sum_norm(2.0 * r)?,
    )
    .param("r", r))
}

/// w²(S*T) ≤ a·w(S*T) + b with a = ‖|T|²+|S|²‖/(2(1+λ)),
/// b = λ‖|T|⁴+|S|⁴‖/(2(1+λ)).
pub fn eval_aldolat(pair: &OperatorPair, lambda: f64) -> Result<BoundEval> {
    check_lambda(lambda)?;
    let w = pair.w_s_star_t()?;
    let a = pair.sum_norm(2.0)? / (2.0 * (1.0 + lambda));
    let b = lambda * pair.sum_norm(4.0)? / (2.0 * (1.0 + lambda));
    let (u, residual) = quadratic_root(a, b);
    let mut eval = BoundEval::new(BoundId::Eq4Aldolat, w * w, a * w + b)
        .param("lambda", lambda)
        .cert("w", w)
        .cert("quadratic_residual", residual);
    eval.explicit_bound = Some(u);
    Ok(eval)
}

fn th2_parts(op: &Operator) -> Result<(f64, f64, f64)> {
    // (‖|T|²+|T*|²‖, w(T²), ‖|T|⁴+|T*|⁴‖)
    Ok((op.sum_norm(2.0)?, op.w_square()?, op.sum_norm(4.0)?))
}

fn th2_rhs(x: f64, w2: f64, y: f64, lambda: f64) -> f64 {
    (2.0 * lambda + 3.0) / (8.0 * (lambda + 1.0)) * x * w2
        + (2.0 * lambda + 1.0) / (8.0 * (lambda + 1.0)) * y
}

/// w⁴(T) ≤ (2λ+3)/(8(λ+1))‖|T|²+|T*|²‖w(T²) + (2λ+1)/(8(λ+1))‖|T|⁴+|T*|⁴‖
pub fn eval_th2(op: &Operator, lambda: f64) -> Result<BoundEval> {
    check_lambda(lambda)?;
    let (x, w2, y) = th2_parts(op)?;
    Ok(BoundEval::new(BoundId::Th2, op.w()?.powi(4), th2_rhs(x, w2, y, lambda)).param("lambda", lambda))
}

/// w⁴ ≤ th2 rhs ≤ ½‖|T|⁴+|T*|⁴‖ as links 0 and 1. At λ = 1 also
/// 5/16·Xw(T²) + 3/16·Y ≤ 1/8·Xw(T²) + 3/8·Y ≤ ½Y as links 2 and 3.
pub fn eval_th2_chain(op: &Operator, lambda: f64) -> Result<Vec<BoundEval>> {
    check_lambda(lambda)?;
    let (x, w2, y) = th2_parts(op)?;
    let middle = th2_rhs(x, w2, y, lambda);
    let outer = 0.5 * y;
    let id = BoundId::Th2Chain;
    let mut out = vec![
        BoundEval::new(id, op.w()?.powi(4), middle).link(0),
        BoundEval::new(id, middle, outer).link(1),
    ];
    if lambda == 1.0 {
        let first = 5.0 / 16.0 * x * w2 + 3.0 / 16.0 * y;
        let second = 1.0 / 8.0 * x * w2 + 3.0 / 8.0 * y;
        out.push(BoundEval::new(id, first, second).link(2));
        out.push(BoundEval::new(id, second, outer).link(3));
    }
    Ok(out
        .into_iter()
        .map(|e| e.param("lambda", lambda))
        .collect())
}

/// w^{4r}(T) ≤ C + D·w^{2r}(T), as link 0 with the explicit bound
/// [(D + √(D²+4C))/2]^{1/(2r)}; link 1 is rhs ≤ ½‖|T|^{4r}+|T*|^{4r}‖.
pub fn eval_th4(op: &Operator, alpha: f64, r: f64) -> Result<Vec<BoundEval>> {
    check_unit("alpha", alpha)?;
    check_r(r, 1.0)?;
    let w = op.w()?;
    let u = w.powf(2.0 * r);
    let w2r = op.w_square()?.powf(r);
    let big = op.sum_norm(4.0 * r)?;
    let c = alpha / 8.0 * big + alpha / 4.0 * op.w_mixed(r)? + alpha / 2.0 * w2r * w2r;
    let d = (1.0 - alpha) / 4.0 * op.sum_norm(2.0 * r)? + (1.0 - alpha) / 2.0 * w2r;
    let rhs = c + d * u;
    let (root, residual) = quadratic_root(d, c);
    let mut main = BoundEval::new(BoundId::Th4, u * u, rhs)
        .link(0)
        .cert("w", w)
        .cert("quadratic_residual", residual);
    main.explicit_bound = Some(root.powf(1.0 / (2.0 * r)));
    let chain = BoundEval::new(BoundId::Th4, rhs, 0.5 * big).link(1);
    Ok([main, chain]
        .into_iter()
        .map(|e| e.param("alpha", alpha).param("r", r))
        .collect())
}

/// (a, b, w(T*S)) with w^{2r}(T*S) ≤ a·w^r(T*S) + b.
fn th6_parts(pair: &OperatorPair, lambda: f64, r: f64) -> Result<(f64, f64, f64)> {
    let a = pair.sum_norm(2.0 * r)? / (2.0 * (lambda + 1.0));
    let b = lambda / (4.0 * (lambda + 1.0)) * pair.sum_norm(4.0 * r)?
        + lambda / (2.0 * (lambda + 1.0)) * pair.w_cross(r)?;
    Ok((a, b, pair.w_t_star_s()?))
}

/// w^{2r}(T*S) ≤ 1/(2(λ+1))‖|T|^{2r}+|S|^{2r}‖w^r(T*S)
///     + λ/(4(λ+1))‖|T|^{4r}+|S|^{4r}‖ + λ/(2(λ+1))w(|S|^{2r}|T|^{2r})
pub fn eval_th6(pair: &OperatorPair, lambda: f64, r: f64) -> Result<BoundEval> {
    check_lambda(lambda)?;
    check_r(r, 1.0)?;
    let (a, b, w) = th6_parts(pair, lambda, r)?;
    let u = w.powf(r);
    let (root, residual) = quadratic_root(a, b);
    let mut eval = BoundEval::new(BoundId::Th6, u * u, a * u + b)
        .param("lambda", lambda)
        .param("r", r)
        .cert("w", w)
        .cert("quadratic_residual", residual);
    eval.explicit_bound = Some(root.powf(1.0 / r));
    Ok(eval)
}

/// The r = 1 instance: w²(T*S) ≤ middle ≤ 1/(2(λ+1))‖|T|²+|S|²‖w(T*S) +
/// λ/(2(λ+1))‖|T|⁴+|S|⁴‖. The middle term is computed directly from
/// |T|², |S|² and compared against the general evaluator at r = 1.
pub fn eval_th6_cor1(pair: &OperatorPair, lambda: f64) -> Result<Vec<BoundEval>> {
    check_lambda(lambda)?;
    let w = pair.w_t_star_s()?;
    let t2 = pair.t().matrix().gram();
    let s2 = pair.s().matrix().gram();
    let x = t2.add(&s2)?.norm()?;
    let y = t2.matrix().matmul(t2.matrix())?;
    let y = HermitianMatrix::from_symmetrized(
        y.add(&s2.matrix().matmul(s2.matrix())?)?.into_dmatrix(),
    )
    .norm()?;
    let cross = numrad::numerical_radius_value(&s2.matrix().matmul(t2.matrix())?)?;
    let l1 = lambda + 1.0;
    let middle = x / (2.0 * l1) * w + lambda / (4.0 * l1) * y + lambda / (2.0 * l1) * cross;
    let outer = x / (2.0 * l1) * w + lambda / (2.0 * l1) * y;
    let general = eval_th6(pair, lambda, 1.0)?;
    let gap = (general.rhs - middle).abs();
    Ok(vec![
        BoundEval::new(BoundId::Th6Cor1, w * w, middle)
            .link(0)
            .param("lambda", lambda)
            .cert("r1_gap", gap),
        BoundEval::new(BoundId::Th6Cor1, middle, outer)
            .link(1)
            .param("lambda", lambda),
    ])
}

/// w^{2r}(T*S) ≤ th6 rhs ≤ ½‖|T|^{4r}+|S|^{4r}‖
pub fn eval_th6_cor2(pair: &OperatorPair, lambda: f64, r: f64) -> Result<Vec<BoundEval>> {
    let main = eval_th6(pair, lambda, r)?;
    let outer = 0.5 * pair.sum_norm(4.0 * r)?;
    Ok([
        BoundEval::new(BoundId::Th6Cor2, main.lhs, main.rhs).link(0),
        BoundEval::new(BoundId::Th6Cor2, main.rhs, outer).link(1),
    ]
    .into_iter()
    .map(|e| e.param("lambda", lambda).param("r", r))
    .collect())
}

/// Four operands A, B, C, D with memoized numerical radii.
pub struct OperatorQuad<'a> {
    a: &'a Operator,
    b: &'a Operator,
    c: &'a Operator,
    d: &'a Operator,
    w_sum: OnceCell<f64>,
    w_plain_sum: OnceCell<f64>,
    w_products: OnceCell<(f64, f64)>,
    w_star_products: OnceCell<(f64, f64)>,
}

impl<'a> OperatorQuad<'a> {
    pub fn new(a: &'a Operator, b: &'a Operator, c: &'a Operator, d: &'a Operator) -> Result<Self> {
        a.t.check_same_dim(&b.t)?;
        a.t.check_same_dim(&c.t)?;
        a.t.check_same_dim(&d.t)?;
        Ok(Self {
            a,
            b,
            c,
            d,
            w_sum: OnceCell::new(),
            w_plain_sum: OnceCell::new(),
            w_products: OnceCell::new(),
            w_star_products: OnceCell::new(),
        })
    }

    /// w(A*B + C*D)
    fn w_sum(&self) -> Result<f64> {
        once(&self.w_sum, || {
            let m = self.a.t.adjoint().matmul(&self.b.t)?;
            numrad::numerical_radius_value(&m.add(&self.c.t.adjoint().matmul(&self.d.t)?)?)
        })
    }

    /// w(AB + CD)
    fn w_plain_sum(&self) -> Result<f64> {
        once(&self.w_plain_sum, || {
            let m = self.a.t.matmul(&self.b.t)?;
            numrad::numerical_radius_value(&m.add(&self.c.t.matmul(&self.d.t)?)?)
        })
    }

    /// (w(|B|²|A|²), w(|D|²|C|²)), or with |A*|, |C*| when `star`.
    fn w_products(&self, star: bool) -> Result<(f64, f64)> {
        let cell = if star {
            &self.w_star_products
        } else {
            &self.w_products
        };
        once(cell, || {
            let abs2 = |op: &Operator| {
                if star {
                    op.abs_star_power(2.0)
                } else {
                    op.abs_power(2.0)
                }
            };
            let ab = numrad::numerical_radius_value(&product(&self.b.abs_power(2.0)?, &abs2(self.a)?)?)?;
            let cd = numrad::numerical_radius_value(&product(&self.d.abs_power(2.0)?, &abs2(self.c)?)?)?;
            Ok((ab, cd))
        })
    }

    /// 2^{2r−3}‖|A|^{4r}+|B|^{4r}+|C|^{4r}+|D|^{4r}‖
    ///     + 2^{2r−2}(w^r(|B|²|A|²) + w^r(|D|²|C|²)),
    /// with |A*|, |C*| in place of |A|, |C| when `star`.
    fn th5_rhs(&self, r: f64, star: bool) -> Result<f64> {
        let p = 4.0 * r;
        let abs_p = |op: &Operator| {
            if star {
                op.abs_star_power(p)
            } else {
                op.abs_power(p)
            }
        };
        let sum = abs_p(self.a)?
            .add(&self.b.abs_power(p)?)?
            .add(&abs_p(self.c)?)?
            .add(&self.d.abs_power(p)?)?;
        let (ab, cd) = self.w_products(star)?;
        Ok(2f64.powf(2.0 * r - 3.0) * sum.norm()? + 2f64.powf(2.0 * r - 2.0) * (ab.powf(r) + cd.powf(r)))
    }
}

/// w^{2r}(A*B + C*D) ≤ 2^{2r−3}‖|A|^{4r}+|B|^{4r}+|C|^{4r}+|D|^{4r}‖
///     + 2^{2r−2}(w^r(|B|²|A|²) + w^r(|D|²|C|²))
pub fn eval_th5(quad: &OperatorQuad, r: f64) -> Result<BoundEval> {
    check_r(r, 1.0)?;
    let lhs = quad.w_sum()?.powf(2.0 * r);
    Ok(BoundEval::new(BoundId::Th5, lhs, quad.th5_rhs(r, false)?).param("r", r))
}

/// w^{2r}(AB + CD) ≤ th5 rhs with A*, C* ≤ 2^{2r−2}[‖|A*|^{4r}+|B|^{4r}‖
/// + ‖|C*|^{4r}+|D|^{4r}‖], r ≥ 2.
pub fn eval_th5_cor(quad: &OperatorQuad, r: f64) -> Result<Vec<BoundEval>> {
    check_r(r, 2.0)?;
    let lhs = quad.w_plain_sum()?.powf(2.0 * r);
    let middle = quad.th5_rhs(r, true)?;
    let p = 4.0 * r;
    let ab = quad.a.abs_star_power(p)?.add(&quad.b.abs_power(p)?)?.norm()?;
    let cd = quad.c.abs_star_power(p)?.add(&quad.d.abs_power(p)?)?.norm()?;
    let outer = 2f64.powf(2.0 * r - 2.0) * (ab + cd);
    Ok(vec![
        BoundEval::new(BoundId::Th5Cor, lhs, middle).link(0).param("r", r),
        BoundEval::new(BoundId::Th5Cor, middle, outer).link(1).param("r", r),
    ])
}

/// For real T, S: sup over real unit x of ⟨TᵀSx, x⟩ ≤ λ/(2(λ+1))‖|T|²+|S|²‖
/// + 1/(4(λ+1))‖T+S‖(‖T‖+‖S‖).
///
/// The left side is the signed form, λ_max of the symmetric part of TᵀS,
/// which is what the polarization argument bounds. The absolute form with
/// the real numerical radius fails (T = I, S = −I); its slack is kept in
/// the `absolute_form_slack` certificate.
pub fn eval_polarization_bound(pair: &OperatorPair, lambda: f64) -> Result<BoundEval> {
    check_lambda(lambda)?;
    let (t, s) = (pair.t().matrix(), pair.s().matrix());
    if !t.is_real() || !s.is_real() {
        return Err(RadlabError::ComplexInput);
    }
    let product = t.adjoint().matmul(s)?;
    let symmetric = product.add(&product.adjoint())?.scale(crate::C64::new(0.5, 0.0));
    let lhs = HermitianMatrix::from_symmetrized(symmetric.into_dmatrix()).lambda_max()?;
    let w_real = numrad::real_numerical_radius(&product)?;
    let sum_norm = crate::matcore::op_norm(&t.add(s)?)?;
    let rhs = lambda / (2.0 * (lambda + 1.0)) * pair.sum_norm(2.0)?
        + sum_norm * (pair.t().norm()? + pair.s().norm()?) / (4.0 * (lambda + 1.0));
    Ok(BoundEval::new(BoundId::PolarizationProp, lhs, rhs)
        .param("lambda", lambda)
        .cert("real_numerical_radius", w_real)
        .cert("absolute_form_slack", rhs - w_real))
}

/// Certificate for `op`, either the supplied one (trusted as is) or a
/// fresh certification. Errors with `NotInvertible` or `HypothesisFailed`.
fn resolve_cert(op: &Operator, cert: Option<&KantorovichCert>) -> Result<KantorovichCert> {
    genlab::check_invertible(op.matrix())?;
    let cert = match cert {
        Some(c) => c.clone(),
        None => match genlab::certify_kantorovich(op.matrix())? {
            Some(c) => c,
            None => {
                let (f, b) = genlab::kantorovich_levels(op.matrix())?;
                return Err(RadlabError::HypothesisFailed(format!(
                    "no m > 1 with m|T| <= |T*| or m|T*| <= |T| (largest m: {:.6}, {:.6})",
                    f, b
                )));
            }
        },
    };
    if !(cert.m_max > 1.0) {
        return Err(RadlabError::HypothesisFailed(format!(
            "certified m = {} does not exceed 1",
            cert.m_max
        )));
    }
    Ok(cert)
}

fn with_cert(eval: BoundEval, cert: &KantorovichCert, k: f64) -> BoundEval {
    let direction = match cert.direction {
        CertDirection::MtLeqTstar => "mT_leq_Tstar",
        CertDirection::MtstarLeqT => "mTstar_leq_T",
    };
    eval.cert("m_max", cert.m_max)
        .cert("direction", direction)
        .cert("residual", cert.residual)
        .cert("kantorovich_ratio", k)
}

/// w^{2r}(T) ≤ 1/(4√K(m,2))‖|T|^{2r}+|T*|^{2r}‖ + ½w^r(T²) at m = m_max,
/// followed by the f(t) = t^r form f(w²) ≤ 1/(4√K)‖f(|T|²)+f(|T*|²)‖
/// + ½f(w(T²)) computed from T*T and TT* directly.
pub fn eval_kantorovich_cor(
    op: &Operator,
    cert: Option<&KantorovichCert>,
    r: f64,
) -> Result<Vec<BoundEval>> {
    check_r(r, 1.0)?;
    let cert = resolve_cert(op, cert)?;
    let k = kantorovich_ratio(cert.m_max)?;
    let w = op.w()?;
    let w2 = op.w_square()?;
    let coef = 1.0 / (4.0 * k.sqrt());
    let power = BoundEval::new(
        BoundId::KantTh1Cor,
        w.powf(2.0 * r),
        coef * op.sum_norm(2.0 * r)? + 0.5 * w2.powf(r),
    )
    .cert("form", "power");
    let f = |t: f64| t.powf(r);
    let gram = PsdSpectrum::new(&op.matrix().gram())?.power(r)?;
    let cogram = PsdSpectrum::new(&op.matrix().cogram())?.power(r)?;
    let convex = BoundEval::new(
        BoundId::KantTh1Cor,
        f(w * w),
        coef * gram.add(&cogram)?.norm()? + 0.5 * f(w2),
    )
    .cert("form", "convex_fn");
    Ok([power, convex]
        .into_iter()
        .map(|e| with_cert(e.param("r", r), &cert, k))
        .collect())
}

/// w²(T) ≤ β/(2√K(m,2))‖|T|²+|T*|²‖ + γw(T²) with β = min{(1+λ)/2, 1−λ/2},
/// γ = min{(1−λ)/2, λ/2}, at m = m_max.
pub fn eval_kantorovich_prop(
    op: &Operator,
    cert: Option<&KantorovichCert>,
    lambda: f64,
) -> Result<BoundEval> {
    check_unit("lambda", lambda)?;
    let cert = resolve_cert(op, cert)?;
    let k = kantorovich_ratio(cert.m_max)?;
    let (beta, gamma) = kantorovich_prop_coefficients(lambda);
    let w = op.w()?;
    let rhs = beta / (2.0 * k.sqrt()) * op.sum_norm(2.0)? + gamma * op.w_square()?;
    Ok(with_cert(
        BoundEval::new(BoundId::KantProp, w * w, rhs)
            .param("lambda", lambda)
            .cert("beta", beta)
            .cert("gamma", gamma),
        &cert,
        k,
    ))
}

/// (β, γ) = (min{(1+λ)/2, 1−λ/2}, min{(1−λ)/2, λ/2})
pub fn kantorovich_prop_coefficients(lambda: f64) -> (f64, f64) {
    (
        (0.5 * (1.0 + lambda)).min(1.0 - 0.5 * lambda),
        (0.5 * (1.0 - lambda)).min(0.5 * lambda),
    )
}

/// Operands for a catalog evaluation; bounds read the slots they need.
#[derive(Clone, Copy)]
pub struct Operands<'a> {
    pub t: &'a Operator,
    /// (T, S) for product bounds.
    pub pair: Option<&'a OperatorPair<'a>>,
    /// (A, B, C, D) for sum-of-products bounds.
    pub quad: Option<&'a OperatorQuad<'a>>,
    /// Real (T, S) for the real-space bound.
    pub real_pair: Option<&'a OperatorPair<'a>>,
    pub cert: Option<&'a KantorovichCert>,
}

impl<'a> Operands<'a> {
    pub fn single(t: &'a Operator) -> Self {
        Self {
            t,
            pair: None,
            quad: None,
            real_pair: None,
            cert: None,
        }
    }
}

fn missing(what: &str) -> RadlabError {
    RadlabError::Config(format!("bound needs {what}"))
}

/// Evaluates `id` at one parameter point.
pub fn evaluate(id: BoundId, ops: &Operands, params: &BoundParams) -> Result<Vec<BoundEval>> {
    let BoundParams { r, lambda, alpha } = *params;
    let one = |e: BoundEval| vec![e];
    let pair = || ops.pair.ok_or_else(|| missing("an operand pair"));
    let quad = || ops.quad.ok_or_else(|| missing("four operands"));
    Ok(match id {
        BoundId::Eq1Lower => {
            let [lower, _] = eval_eq1(ops.t)?;
            one(lower)
        }
        BoundId::Eq1Upper => {
            let [_, upper] = eval_eq1(ops.t)?;
            one(upper)
        }
        BoundId::Eq2Kittaneh => one(eval_kittaneh(ops.t)?),
        BoundId::ElhaddadKittaneh => one(eval_elhaddad_kittaneh(ops.t, r)?),
        BoundId::Eq3AbuOmar => one(eval_abu_omar(ops.t)?),
        BoundId::Eq11Bhunia => one(eval_bhunia(ops.t)?),
        BoundId::Th2 => one(eval_th2(ops.t, lambda)?),
        BoundId::Th2Chain => eval_th2_chain(ops.t, lambda)?,
        BoundId::Th4 => eval_th4(ops.t, alpha, r)?,
        BoundId::Dragomir => one(eval_dragomir(pair()?, r)?),
        BoundId::Eq4Aldolat => one(eval_aldolat(pair()?, lambda)?),
        BoundId::Th6 => one(eval_th6(pair()?, lambda, r)?),
        BoundId::Th6Cor1 => eval_th6_cor1(pair()?, lambda)?,
        BoundId::Th6Cor2 => eval_th6_cor2(pair()?, lambda, r)?,
        BoundId::Th5 => one(eval_th5(quad()?, r)?),
        BoundId::Th5Cor => eval_th5_cor(quad()?, r)?,
        BoundId::PolarizationProp => {
            let real = ops.real_pair.ok_or_else(|| missing("a real operand pair"))?;
            one(eval_polarization_bound(real, lambda)?)
        }
        BoundId::KantTh1Cor => eval_kantorovich_cor(ops.t, ops.cert, r)?,
        BoundId::KantProp => one(eval_kantorovich_prop(ops.t, ops.cert, lambda)?),
    })
}

/// Evaluates `id` on operands given in order (T; T, S; or A, B, C, D).
/// Certified bounds use `cert` when given and certify `ops[0]` otherwise.
pub fn evaluate_operators(
    id: BoundId,
    ops: &[Operator],
    cert: Option<&KantorovichCert>,
    params: &BoundParams,
) -> Result<Vec<BoundEval>> {
    let arity = id.arity();
    if ops.len() != arity.operands() {
        return Err(RadlabError::Config(format!(
            "{id} takes {} operands, got {}",
            arity.operands(),
            ops.len()
        )));
    }
    match arity {
        Arity::Single => evaluate(id, &Operands::single(&ops[0]), params),
        Arity::Certified => evaluate(
            id,
            &Operands {
                cert,
                ..Operands::single(&ops[0])
            },
            params,
        ),
        Arity::Pair | Arity::RealPair => {
            let pair = OperatorPair::new(&ops[0], &ops[1])?;
            let o = if arity == Arity::Pair {
                Operands {
                    pair: Some(&pair),
                    ..Operands::single(&ops[0])
                }
            } else {
                Operands {
                    real_pair: Some(&pair),
                    ..Operands::single(&ops[0])
                }
            };
            evaluate(id, &o, params)
        }
        Arity::Quad => {
            let quad = OperatorQuad::new(&ops[0], &ops[1], &ops[2], &ops[3])?;
            evaluate(
                id,
                &Operands {
                    quad: Some(&quad),
                    ..Operands::single(&ops[0])
                },
                params,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::C64;

    fn op(rows: &[Vec<f64>]) -> Operator {
        Operator::new(ComplexMatrix::from_real_rows(rows).unwrap())
    }

    fn jordan() -> Operator {
        op(&[vec![0.0, 1.0], vec![0.0, 0.0]])
    }

    fn identity(n: usize) -> Operator {
        Operator::new(ComplexMatrix::identity(n).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn ids_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(id.as_str().parse::<BoundId>().unwrap(), id);
        }
        assert!("eq5".parse::<BoundId>().is_err());
    }

    #[test]
    fn eq1_examples() {
        let [lower, upper] = eval_eq1(&jordan()).unwrap();
        assert!(close(lower.slack, 0.0, 1e-12) && close(lower.rhs, 0.5, 1e-12));
        let u = op(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let [_, upper_u] = eval_eq1(&u).unwrap();
        assert!(upper_u.slack.abs() < 1e-12);
        assert!(upper.slack > 0.4);
    }

    #[test]
    fn kittaneh_family_on_jordan() {
        let j = jordan();
        let k = eval_kittaneh(&j).unwrap();
        assert!(k.slack.abs() < 1e-12 && close(k.rhs, 0.5, 1e-12));
        let ek = eval_elhaddad_kittaneh(&j, 1.0).unwrap();
        assert!(close(ek.rhs, 0.5, 1e-12) && close(ek.lhs, 0.25, 1e-12));
        assert!(eval_elhaddad_kittaneh(&j, 0.5).is_err());
        let ao = eval_abu_omar(&j).unwrap();
        assert!(ao.slack.abs() < 1e-12 && close(ao.rhs, 0.25, 1e-12));
        let bh = eval_bhunia(&j).unwrap();
        assert!(bh.slack.abs() < 1e-12);
        let id = identity(3);
        let bh = eval_bhunia(&id).unwrap();
        assert!(close(bh.lhs, 1.0, 1e-12) && close(bh.rhs, 1.0, 1e-12));
    }

    #[test]
    fn pair_examples() {
        let id = identity(2);
        let pair = OperatorPair::new(&id, &id).unwrap();
        let e = eval_aldolat(&pair, 1.0).unwrap();
        assert!(close(e.lhs, 1.0, 1e-12) && close(e.rhs, 1.0, 1e-12));
        let th6 = eval_th6(&pair, 1.0, 1.0).unwrap();
        assert!(close(th6.rhs, 1.0, 1e-12) && th6.slack.abs() < 1e-12);
        let u = op(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let pair = OperatorPair::new(&u, &u).unwrap();
        let d = eval_dragomir(&pair, 2.0).unwrap();
        assert!(close(d.lhs, 1.0, 1e-12) && close(d.rhs, 1.0, 1e-12));
    }

    #[test]
    fn aldolat_at_zero_lambda_is_dragomir_times_w() {
        let t = Operator::new(crate::genlab::generate_one(crate::genlab::Family::Ginibre, 3, 1, 0).unwrap());
        let s = Operator::new(crate::genlab::generate_one(crate::genlab::Family::Ginibre, 3, 2, 0).unwrap());
        let pair = OperatorPair::new(&t, &s).unwrap();
        let a = eval_aldolat(&pair, 0.0).unwrap();
        let d = eval_dragomir(&pair, 1.0).unwrap();
        assert!((a.rhs - d.rhs * pair.w_s_star_t().unwrap()).abs() <= 1e-12 * a.rhs.max(1.0));
        assert!(a.explicit_bound.unwrap() >= pair.w_s_star_t().unwrap() - 1e-9);
    }

    #[test]
    fn th2_examples() {
        let j = jordan();
        let e = eval_th2(&j, 0.0).unwrap();
        assert!(close(e.rhs, 0.125, 1e-12) && close(e.lhs, 1.0 / 16.0, 1e-12));
        let chain = eval_th2_chain(&j, 0.0).unwrap();
        assert_eq!(chain.len(), 2);
        assert!(close(chain[1].rhs, 0.5, 1e-12));
        let u = op(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        for lambda in [0.0, 1.0, 7.0] {
            let e = eval_th2(&u, lambda).unwrap();
            assert!(close(e.rhs, 1.0, 1e-12) && e.slack.abs() < 1e-12);
        }
        assert_eq!(eval_th2_chain(&u, 1.0).unwrap().len(), 4);
        assert!(eval_th2(&u, -1.0).is_err());
    }

    #[test]
    fn th4_examples() {
        let e = eval_th4(&jordan(), 1.0, 1.0).unwrap();
        assert!(close(e[0].rhs, 0.125, 1e-12));
        let u = op(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let e = eval_th4(&u, 0.0, 1.0).unwrap();
        assert!(close(e[0].rhs, 1.0, 1e-12) && e[0].slack.abs() < 1e-12);
        assert!(eval_th4(&u, 1.5, 1.0).is_err());
        assert!(eval_th4(&u, 0.5, 0.9).is_err());
    }

    #[test]
    fn th5_examples() {
        let id = identity(2);
        let quad = OperatorQuad::new(&id, &id, &id, &id).unwrap();
        let e = eval_th5(&quad, 1.0).unwrap();
        assert!(close(e.lhs, 4.0, 1e-12) && close(e.rhs, 4.0, 1e-12));
        let chain = eval_th5_cor(&quad, 2.0).unwrap();
        assert!(close(chain[0].lhs, 16.0, 1e-12) && close(chain[1].rhs, 16.0, 1e-12));
        assert!(eval_th5_cor(&quad, 1.5).is_err());
    }

    #[test]
    fn polarization_examples() {
        let id = identity(2);
        let pair = OperatorPair::new(&id, &id).unwrap();
        let e = eval_polarization_bound(&pair, 0.0).unwrap();
        assert!(close(e.lhs, 1.0, 1e-12) && close(e.rhs, 1.0, 1e-12));
        let z = Operator::new(ComplexMatrix::zeros(2).unwrap());
        let pair = OperatorPair::new(&id, &z).unwrap();
        assert_eq!(eval_polarization_bound(&pair, 1.0).unwrap().lhs, 0.0);
        let neg = Operator::new(identity(2).matrix().scale(C64::new(-1.0, 0.0)));
        let pair = OperatorPair::new(&id, &neg).unwrap();
        let e = eval_polarization_bound(&pair, 1.0).unwrap();
        assert!(close(e.lhs, -1.0, 1e-12) && close(e.rhs, 0.5, 1e-12));
        assert!(close(e.certificates["absolute_form_slack"].as_f64().unwrap(), -0.5, 1e-12));
        let c = Operator::new(ComplexMatrix::from_diagonal(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]).unwrap());
        let pair = OperatorPair::new(&c, &id).unwrap();
        assert_eq!(eval_polarization_bound(&pair, 1.0), Err(RadlabError::ComplexInput));
    }

    #[test]
    fn kantorovich_hypothesis_failure() {
        let t = op(&[vec![0.0, 2.0], vec![1.0, 0.0]]);
        assert!(matches!(
            eval_kantorovich_cor(&t, None, 1.0),
            Err(RadlabError::HypothesisFailed(_))
        ));
        assert!(matches!(
            eval_kantorovich_cor(&jordan(), None, 1.0),
            Err(RadlabError::NotInvertible { .. })
        ));
    }

    #[test]
    fn kantorovich_at_unit_m_has_abu_omar_shape() {
        let t = Operator::new(crate::genlab::generate_one(crate::genlab::Family::Ginibre, 4, 9, 0).unwrap());
        let cert = KantorovichCert {
            direction: CertDirection::MtLeqTstar,
            m_max: 1.0 + 1e-12,
            residual: 0.0,
        };
        let recs = eval_kantorovich_cor(&t, Some(&cert), 1.0).unwrap();
        let ao = eval_abu_omar(&t).unwrap();
        assert!((recs[0].rhs - ao.rhs).abs() <= 1e-12 * ao.rhs.max(1.0));
        assert!((recs[1].rhs - recs[0].rhs).abs() <= 1e-12 * ao.rhs.max(1.0));
        assert_eq!(kantorovich_prop_coefficients(1.0), (0.5, 0.0));
        assert_eq!(kantorovich_prop_coefficients(0.0), (0.5, 0.0));
    }

    #[test]
    fn grid_points_respect_ranges() {
        let grid = ParamGrid::default();
        assert_eq!(BoundId::Eq2Kittaneh.grid_points(&grid).len(), 1);
        assert_eq!(BoundId::Th4.grid_points(&grid).len(), 20);
        assert_eq!(BoundId::Th5Cor.grid_points(&grid).len(), 2);
        assert_eq!(BoundId::KantProp.grid_points(&grid).len(), 3);
        assert_eq!(BoundId::Th6.grid_points(&grid).len(), 20);
    }

    #[test]
    fn record_serializes_with_stable_fields() {
        let e = eval_kittaneh(&jordan()).unwrap();
        let v: Value = serde_json::to_value(&e).unwrap();
        for key in ["bound_id", "params", "lhs", "rhs", "slack", "explicit_bound", "hypothesis_ok", "certificates"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["bound_id"], "eq2_kittaneh");
    }
}
