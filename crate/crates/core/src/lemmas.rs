//! Checkers for the scalar and vector inequalities the operator bounds are
//! built from. Every checker returns the two sides and `slack = rhs - lhs`.

use serde::Serialize;

use crate::error::{domain, RadlabError, Result};
use crate::matcore::{self, inner, vec_norm, CVector, ComplexMatrix, HermitianMatrix, PsdSpectrum};

/// Allowed deviation of ‖e‖ from 1.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl LemmaCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
        }
    }

    /// slack ≥ −tol·max(1, |rhs|)
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol * self.rhs.abs().max(1.0)
    }
}

/// A two-step inequality lhs ≤ middle ≤ outer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub lhs: f64,
    pub middle: f64,
    pub outer: f64,
    /// middle − lhs
    pub slack1: f64,
    /// outer − middle
    pub slack2: f64,
}

impl ChainCheck {
    pub fn new(lhs: f64, middle: f64, outer: f64) -> Self {
        Self {
            lhs,
            middle,
            outer,
            slack1: middle - lhs,
            slack2: outer - middle,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        let scale = self.outer.abs().max(1.0);
        self.slack1 >= -tol * scale && self.slack2 >= -tol * scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorTriple {
    x: CVector,
    y: CVector,
    e: CVector,
}

impl VectorTriple {
    pub fn new(x: CVector, y: CVector, e: CVector) -> Result<Self> {
        check_pair(&x, &y)?;
        check_pair(&x, &e)?;
        check_unit(&e)?;
        Ok(Self { x, y, e })
    }

    pub fn x(&self) -> &CVector {
        &self.x
    }

    pub fn y(&self) -> &CVector {
        &self.y
    }

    pub fn e(&self) -> &CVector {
        &self.e
    }

    /// |⟨x,e⟩⟨e,y⟩|
    fn buzano_lhs(&self) -> f64 {
        (inner(&self.x, &self.e) * inner(&self.e, &self.y)).norm()
    }

    /// (‖x‖‖y‖, |⟨x,y⟩|)
    fn pair_terms(&self) -> (f64, f64) {
        pair_terms(&self.x, &self.y)
    }
}

fn check_finite(v: &CVector) -> Result<()> {
    match v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(RadlabError::NonFinite { row: i, col: 0 }),
        None => Ok(()),
    }
}

fn check_pair(x: &CVector, y: &CVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(RadlabError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.is_empty() {
        return Err(RadlabError::DimensionOutOfRange(0));
    }
    check_finite(x)?;
    check_finite(y)
}

fn check_unit(e: &CVector) -> Result<()> {
    let norm = vec_norm(e);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(RadlabError::UnitViolation(norm));
    }
    Ok(())
}

fn check_real(v: &CVector) -> Result<()> {
    if v.iter().any(|z| z.im != 0.0) {
        return Err(RadlabError::ComplexInput);
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be a finite value >= 0, got {lambda}")));
    }
    Ok(())
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn check_power(r: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(domain(format!("power r must be a finite value >= 1, got {r}")));
    }
    Ok(())
}

fn pair_terms(x: &CVector, y: &CVector) -> (f64, f64) {
    (vec_norm(x) * vec_norm(y), inner(x, y).norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarPair {
    x: f64,
    y: f64,
    t: f64,
}

impl ScalarPair {
    pub fn new(x: f64, y: f64, t: f64) -> Result<Self> {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(domain(format!("x and y must be positive and finite, got {x}, {y}")));
        }
        check_unit_interval("t", t)?;
        Ok(Self { x, y, t })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn arithmetic(&self) -> f64 {
        self.t * self.x + (1.0 - self.t) * self.y
    }

    fn geometric(&self) -> f64 {
        self.x.powf(self.t) * self.y.powf(1.0 - self.t)
    }
}

/// f(t) = t^r with r ≥ 1: increasing and convex on [0, ∞), f(0) = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexPowerFn {
    r: f64,
}

impl ConvexPowerFn {
    pub fn new(r: f64) -> Result<Self> {
        check_power(r)?;
        Ok(Self { r })
    }

    pub fn exponent(&self) -> f64 {
        self.r
    }

    pub fn eval(&self, t: f64) -> f64 {
        t.powf(self.r)
    }
}

/// K(m, 2) = (m+1)²/(4m).
pub fn kantorovich_ratio(m: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(domain(format!("Kantorovich ratio needs m > 0, got {m}")));
    }
    Ok((m + 1.0) * (m + 1.0) / (4.0 * m))
}

/// x^t y^{1−t} ≤ t x + (1−t) y
pub fn check_young(p: &ScalarPair) -> LemmaCheck {
    LemmaCheck::new(p.geometric(), p.arithmetic())
}

/// K^ρ(m,2) x^t y^{1−t} ≤ t x + (1−t) y with ρ = min{t, 1−t} and m = x/y.
pub fn check_kantorovich_young(p: &ScalarPair) -> Result<LemmaCheck> {
    check_kantorovich_young_with_m(p, p.x / p.y)
}

/// As [`check_kantorovich_young`] with an arbitrary m; outside m = x/y the
/// inequality can fail and the negative slack is reported as is.
pub fn check_kantorovich_young_with_m(p: &ScalarPair, m: f64) -> Result<LemmaCheck> {
    let rho = p.t.min(1.0 - p.t);
    let k = kantorovich_ratio(m)?;
    Ok(LemmaCheck::new(k.powf(rho) * p.geometric(), p.arithmetic()))
}

/// |⟨x,e⟩⟨e,y⟩| ≤ ½(‖x‖‖y‖ + |⟨x,y⟩|)
pub fn check_buzano(v: &VectorTriple) -> LemmaCheck {
    let (nn, xy) = v.pair_terms();
    LemmaCheck::new(v.buzano_lhs(), 0.5 * (nn + xy))
}

/// |⟨x,y⟩|² ≤ 1/(λ+1)‖x‖‖y‖|⟨x,y⟩| + λ/(λ+1)‖x‖²‖y‖² ≤ ‖x‖²‖y‖²
pub fn check_cauchyimp(x: &CVector, y: &CVector, lambda: f64) -> Result<ChainCheck> {
    check_pair(x, y)?;
    check_lambda(lambda)?;
    let (nn, xy) = pair_terms(x, y);
    let middle = (nn * xy + lambda * nn * nn) / (lambda + 1.0);
    Ok(ChainCheck::new(xy * xy, middle, nn * nn))
}

fn gen_buzano_rhs(nn: f64, xy: f64, lambda: f64) -> f64 {
    0.25 * ((2.0 * lambda + 3.0) / (lambda + 1.0) * nn * xy
        + (2.0 * lambda + 1.0) / (lambda + 1.0) * nn * nn)
}

/// |⟨x,e⟩⟨e,y⟩|² ≤ ¼((2λ+3)/(λ+1)‖x‖‖y‖|⟨x,y⟩| + (2λ+1)/(λ+1)‖x‖²‖y‖²)
pub fn check_gen_buzano(v: &VectorTriple, lambda: f64) -> Result<LemmaCheck> {
    check_lambda(lambda)?;
    let (nn, xy) = v.pair_terms();
    let lhs = v.buzano_lhs();
    Ok(LemmaCheck::new(lhs * lhs, gen_buzano_rhs(nn, xy, lambda)))
}

/// Re-derives the generalized Buzano bound by composing the Buzano and
/// Cauchy–Schwarz refinement checkers: squaring Buzano gives
/// ¼(‖x‖²‖y‖² + 2‖x‖‖y‖|⟨x,y⟩| + |⟨x,y⟩|²); bounding the last term by the
/// refinement's middle expression gives the composed right side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenBuzanoChain {
    /// |⟨x,e⟩⟨e,y⟩|²
    pub lhs: f64,
    /// squared Buzano right side
    pub buzano_squared: f64,
    /// right side after substituting the refinement
    pub composed: f64,
    /// the closed-form generalized Buzano right side
    pub stated: f64,
}

impl GenBuzanoChain {
    /// lhs ≤ buzano² ≤ composed, and composed ≥ stated − tol.
    pub fn holds(&self, tol: f64) -> bool {
        let scale = self.composed.abs().max(1.0) * tol;
        self.lhs <= self.buzano_squared + scale
            && self.buzano_squared <= self.composed + scale
            && self.composed >= self.stated - scale
    }
}

pub fn check_gen_buzano_chain(v: &VectorTriple, lambda: f64) -> Result<GenBuzanoChain> {
    let buzano = check_buzano(v);
    let cauchy = check_cauchyimp(&v.x, &v.y, lambda)?;
    let (nn, xy) = v.pair_terms();
    let composed = 0.25 * (nn * nn + 2.0 * xy * nn + cauchy.middle);
    Ok(GenBuzanoChain {
        lhs: buzano.lhs * buzano.lhs,
        buzano_squared: buzano.rhs * buzano.rhs,
        composed,
        stated: gen_buzano_rhs(nn, xy, lambda),
    })
}

/// |⟨x,e⟩⟨e,y⟩|^{2r} ≤ α/2[‖x‖^{2r}‖y‖^{2r} + |⟨x,y⟩|^{2r}]
///     + (1−α)/2[‖x‖^r‖y‖^r + |⟨x,y⟩|^r]|⟨x,e⟩⟨e,y⟩|^r
pub fn check_dolat23(v: &VectorTriple, alpha: f64, r: f64) -> Result<LemmaCheck> {
    check_unit_interval("alpha", alpha)?;
    check_power(r)?;
    let (nn, xy) = v.pair_terms();
    let b = v.buzano_lhs().powf(r);
    let rhs = 0.5 * alpha * (nn.powf(2.0 * r) + xy.powf(2.0 * r))
        + 0.5 * (1.0 - alpha) * (nn.powf(r) + xy.powf(r)) * b;
    Ok(LemmaCheck::new(b * b, rhs))
}

/// The two branch inequalities
/// |⟨x,e⟩⟨e,y⟩|^r ≤ (1+λ)/2‖x‖^r‖y‖^r + (1−λ)/2|⟨x,y⟩|^r and
/// |⟨x,e⟩⟨e,y⟩|^r ≤ (1−λ/2)‖x‖^r‖y‖^r + λ/2|⟨x,y⟩|^r, reported against the
/// smaller right side.
pub fn check_ext_buzano(v: &VectorTriple, lambda: f64, r: f64) -> Result<LemmaCheck> {
    check_unit_interval("lambda", lambda)?;
    check_power(r)?;
    let (nn, xy) = v.pair_terms();
    let (a, b) = (nn.powf(r), xy.powf(r));
    let first = 0.5 * (1.0 + lambda) * a + 0.5 * (1.0 - lambda) * b;
    let second = (1.0 - 0.5 * lambda) * a + 0.5 * lambda * b;
    Ok(LemmaCheck::new(v.buzano_lhs().powf(r), first.min(second)))
}

/// ‖x+y‖² ≤ 1/(λ+1)(‖x‖+‖y‖)‖x+y‖ + λ/(λ+1)(‖x‖+‖y‖)² ≤ (‖x‖+‖y‖)²
pub fn check_imp_triangle(x: &CVector, y: &CVector, lambda: f64) -> Result<ChainCheck> {
    check_pair(x, y)?;
    check_lambda(lambda)?;
    let s = vec_norm(x) + vec_norm(y);
    let sum = vec_norm(&(x + y));
    let middle = (s * sum + lambda * s * s) / (lambda + 1.0);
    Ok(ChainCheck::new(sum * sum, middle, s * s))
}

/// |⟨x,y⟩ − ¼(‖x+y‖² − ‖x−y‖²)| for real vectors; returned as the lhs with
/// a zero rhs so `slack = −residual`.
pub fn check_polarization(x: &CVector, y: &CVector) -> Result<f64> {
    check_pair(x, y)?;
    check_real(x)?;
    check_real(y)?;
    let plus = vec_norm(&(x + y));
    let minus = vec_norm(&(x - y));
    Ok((inner(x, y).re - 0.25 * (plus * plus - minus * minus)).abs())
}

/// Scale for the polarization residual tolerance.
pub fn polarization_scale(x: &CVector, y: &CVector) -> f64 {
    let s = vec_norm(x) + vec_norm(y);
    (s * s).max(1.0)
}

/// ⟨x,y⟩ ≤ λ/(4(λ+1))(‖x‖+‖y‖)² + 1/(4(λ+1))‖x+y‖(‖x‖+‖y‖), real vectors.
///
/// Polarization bounds the signed inner product by ¼‖x+y‖², so that is
/// the checked left side. With |⟨x,y⟩| the inequality fails at y = −x,
/// where the right side is λ/(λ+1)‖x‖² and the left side is ‖x‖²; see
/// [`app_imp_triangle_absolute_slack`].
pub fn check_app_imp_triangle(x: &CVector, y: &CVector, lambda: f64) -> Result<LemmaCheck> {
    let rhs = app_imp_triangle_rhs(x, y, lambda)?;
    Ok(LemmaCheck::new(inner(x, y).re, rhs))
}

/// Slack of the absolute-value form |⟨x,y⟩| ≤ (same right side).
pub fn app_imp_triangle_absolute_slack(x: &CVector, y: &CVector, lambda: f64) -> Result<f64> {
    Ok(app_imp_triangle_rhs(x, y, lambda)? - inner(x, y).norm())
}

fn app_imp_triangle_rhs(x: &CVector, y: &CVector, lambda: f64) -> Result<f64> {
    check_pair(x, y)?;
    check_real(x)?;
    check_real(y)?;
    check_lambda(lambda)?;
    let s = vec_norm(x) + vec_norm(y);
    let sum = vec_norm(&(x + y));
    Ok((lambda * s * s + sum * s) / (4.0 * (lambda + 1.0)))
}

fn psd_power_form(m: &HermitianMatrix, x: &CVector, r: f64) -> Result<LemmaCheck> {
    check_finite(x)?;
    if x.len() != m.dim() {
        return Err(RadlabError::DimensionMismatch {
            expected: m.dim(),
            got: x.len(),
        });
    }
    check_unit(x)?;
    let spectrum = PsdSpectrum::new(m)?;
    let powered = if r == 1.0 {
        m.clone()
    } else {
        spectrum.power(r)?
    };
    let q = m.quadratic_form(x)?.max(0.0);
    Ok(LemmaCheck::new(q.powf(r), powered.quadratic_form(x)?))
}

/// ⟨Mx,x⟩^r ≤ ⟨M^r x,x⟩ for PSD M, unit x, r ≥ 1.
pub fn check_mccarthy(m: &HermitianMatrix, x: &CVector, r: f64) -> Result<LemmaCheck> {
    check_power(r)?;
    psd_power_form(m, x, r)
}

/// f(⟨Mx,x⟩) ≤ ⟨f(M)x,x⟩ for PSD M, unit x and f(t) = t^r.
pub fn check_jensen_op(m: &HermitianMatrix, x: &CVector, f: ConvexPowerFn) -> Result<LemmaCheck> {
    psd_power_form(m, x, f.exponent())
}

/// ‖((A+B)/2)^r‖ ≤ ‖(A^r + B^r)/2‖ for PSD A, B.
pub fn check_convex_op_norm(a: &HermitianMatrix, b: &HermitianMatrix, r: f64) -> Result<LemmaCheck> {
    check_power(r)?;
    let ar = PsdSpectrum::new(a)?.power(r)?;
    let br = PsdSpectrum::new(b)?.power(r)?;
    let mean = a.add(b)?.scale(0.5);
    let mean_r = PsdSpectrum::new(&mean)?.power(r)?;
    Ok(LemmaCheck::new(mean_r.norm()?, ar.add(&br)?.scale(0.5).norm()?))
}

/// |⟨Tx,y⟩|² ≤ ⟨|T|x,x⟩⟨|T*|y,y⟩
pub fn check_mixed_schwarz(t: &ComplexMatrix, x: &CVector, y: &CVector) -> Result<LemmaCheck> {
    check_pair(x, y)?;
    let abs_t = matcore::abs_value(t)?;
    let abs_t_star = matcore::abs_value(&t.adjoint())?;
    let lhs = inner(&t.apply(x)?, y).norm_sqr();
    let rhs = abs_t.quadratic_form(x)?.max(0.0) * abs_t_star.quadratic_form(y)?.max(0.0);
    Ok(LemmaCheck::new(lhs, rhs))
}

/// f(αx) ≤ αf(x) for f(t) = t^r, x ≥ 0, α ∈ [0,1].
pub fn check_convex_scalar(f: ConvexPowerFn, x: f64, alpha: f64) -> Result<LemmaCheck> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("x must be finite and >= 0, got {x}")));
    }
    check_unit_interval("alpha", alpha)?;
    Ok(LemmaCheck::new(f.eval(alpha * x), alpha * f.eval(x)))
}
