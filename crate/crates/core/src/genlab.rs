//! Deterministic operand families and certification of the Loewner-order
//! hypotheses m|T| ≤ |T*| and m|T*| ≤ |T|.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{RadlabError, Result};
use crate::matcore::{self, ComplexMatrix, HermitianMatrix, PsdSpectrum, C64};
use crate::rng;

/// Relative invertibility threshold on the smallest singular value.
pub const INVERTIBLE_REL: f64 = 1e-10;

/// m_max must exceed 1 by this margin to count as certified.
pub const KANTOROVICH_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ginibre,
    Normal,
    NilpotentJordan,
    UpperTriangular,
    RealGinibre,
    Unitary,
    Psd,
    KantorovichSearch,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Ginibre,
        Family::Normal,
        Family::NilpotentJordan,
        Family::UpperTriangular,
        Family::RealGinibre,
        Family::Unitary,
        Family::Psd,
        Family::KantorovichSearch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ginibre => "ginibre",
            Family::Normal => "normal",
            Family::NilpotentJordan => "nilpotent_jordan",
            Family::UpperTriangular => "upper_triangular",
            Family::RealGinibre => "real_ginibre",
            Family::Unitary => "unitary",
            Family::Psd => "psd",
            Family::KantorovichSearch => "kantorovich_search",
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Family::RealGinibre | Family::NilpotentJordan)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = RadlabError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| RadlabError::Config(format!("unknown family '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub dim: usize,
    pub seed: u64,
    pub count: usize,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        if self.count == 0 {
            return Err(RadlabError::Config("family count must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=matcore::MAX_DIM).contains(&dim) {
        return Err(RadlabError::UnsupportedDim(dim));
    }
    Ok(())
}

/// Materializes the stream described by `spec`.
pub fn generate(spec: &FamilySpec) -> Result<Vec<ComplexMatrix>> {
    spec.validate()?;
    (0..spec.count as u64)
        .map(|i| generate_one(spec.family, spec.dim, spec.seed, i))
        .collect()
}

fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

fn ginibre_raw<R: Rng>(n: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = ginibre_raw(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the phases of R's diagonal so Q is Haar distributed.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).scale_mut(1.0);
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Element `index` of the family stream. A pure function of its inputs.
pub fn generate_one(family: Family, dim: usize, seed: u64, index: u64) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let n = dim;
    let mut rng = rng::stream(seed, rng::tag(family.as_str()), index);
    let m = match family {
        Family::Ginibre => ginibre_raw(n, &mut rng),
        Family::RealGinibre => DMatrix::from_fn(n, n, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), 0.0)
        }),
        Family::UpperTriangular => DMatrix::from_fn(n, n, |i, j| {
            let z = complex_normal(&mut rng);
            if i <= j {
                z
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        Family::NilpotentJordan => {
            // index 0 is the canonical Jordan block, later indices are
            // weighted shifts with positive weights
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n - 1 {
                let w = if index == 0 {
                    1.0
                } else {
                    rng.random_range(0.1..2.0)
                };
                m[(i, i + 1)] = C64::new(w, 0.0);
            }
            m
        }
        Family::Unitary => haar_unitary(n, &mut rng),
        Family::Normal => {
            let u = haar_unitary(n, &mut rng);
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
                complex_normal(&mut rng)
            }));
            &u * d * u.adjoint()
        }
        Family::Psd => {
            let g = ginibre_raw(n, &mut rng);
            (&g * g.adjoint()).map(|z| z / n as f64)
        }
        Family::KantorovichSearch => {
            let sub = if index.is_multiple_of(2) {
                Family::Ginibre
            } else {
                Family::UpperTriangular
            };
            return generate_one(sub, dim, seed, index / 2);
        }
    };
    ComplexMatrix::new(m)
}

/// Errors with `NotInvertible` unless σ_min(T) > 1e-10·‖T‖.
pub fn check_invertible(t: &ComplexMatrix) -> Result<()> {
    let sigma_min = matcore::min_singular_value(t)?;
    let threshold = INVERTIBLE_REL * matcore::op_norm(t)?;
    if sigma_min > threshold {
        Ok(())
    } else {
        Err(RadlabError::NotInvertible {
            sigma_min,
            threshold,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertDirection {
    /// m|T| ≤ |T*|
    MtLeqTstar,
    /// m|T*| ≤ |T|
    MtstarLeqT,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KantorovichCert {
    pub direction: CertDirection,
    pub m_max: f64,
    /// λ_min of the certifying difference at m_max.
    pub residual: f64,
}

/// Largest m with m·P ≤ Q for positive definite P:
/// λ_min(P^{-1/2} Q P^{-1/2}).
fn max_loewner_multiple(p_spec: &PsdSpectrum, q: &HermitianMatrix, p_exp: f64) -> Result<f64> {
    let p_inv_sqrt = p_spec.inverse_power(p_exp)?;
    let inner = p_inv_sqrt
        .matrix()
        .matmul(q.matrix())?
        .matmul(p_inv_sqrt.matrix())?;
    HermitianMatrix::from_symmetrized(inner.into_dmatrix()).lambda_min()
}

/// The maximal multiples for both directions, (m for m|T| ≤ |T*|,
/// m for m|T*| ≤ |T|).
pub fn kantorovich_levels(t: &ComplexMatrix) -> Result<(f64, f64)> {
    check_invertible(t)?;
    let gram = PsdSpectrum::new(&t.gram())?;
    let cogram = PsdSpectrum::new(&t.cogram())?;
    let abs_t = gram.power(0.5)?;
    let abs_t_star = cogram.power(0.5)?;
    // |T|^{-1/2} = (T*T)^{-1/4}
    let forward = max_loewner_multiple(&gram, &abs_t_star, 0.25)?;
    let backward = max_loewner_multiple(&cogram, &abs_t, 0.25)?;
    Ok((forward, backward))
}

/// Certifies m|T| ≤ |T*| or m|T*| ≤ |T| with m > 1, returning the direction
/// with the larger maximal m. `None` when neither exceeds 1 + 1e-9.
pub fn certify_kantorovich(t: &ComplexMatrix) -> Result<Option<KantorovichCert>> {
    let (forward, backward) = kantorovich_levels(t)?;
    let (direction, m_max) = if forward >= backward {
        (CertDirection::MtLeqTstar, forward)
    } else {
        (CertDirection::MtstarLeqT, backward)
    };
    if m_max <= 1.0 + KANTOROVICH_MARGIN {
        return Ok(None);
    }
    let (p, q) = cert_operands(t, direction)?;
    let residual = q.sub(&p.scale(m_max))?.lambda_min()?;
    Ok(Some(KantorovichCert {
        direction,
        m_max,
        residual,
    }))
}

/// (P, Q) such that the certified statement reads m·P ≤ Q.
pub fn cert_operands(
    t: &ComplexMatrix,
    direction: CertDirection,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let abs_t = matcore::abs_value(t)?;
    let abs_t_star = matcore::abs_value(&t.adjoint())?;
    Ok(match direction {
        CertDirection::MtLeqTstar => (abs_t, abs_t_star),
        CertDirection::MtstarLeqT => (abs_t_star, abs_t),
    })
}

#[derive(Clone, Debug)]
pub struct KantorovichSearch {
    pub hits: Vec<(ComplexMatrix, KantorovichCert)>,
    pub candidates: usize,
    pub non_invertible: usize,
    /// Largest maximal multiple seen over all candidates and directions.
    pub best_m: f64,
}

impl KantorovichSearch {
    pub fn hit_rate(&self) -> f64 {
        self.hits.len() as f64 / self.candidates.max(1) as f64
    }
}

/// Scans `budget` ginibre / upper-triangular candidates, keeping the
/// certified ones. Errors with `NoHitsInBudget` when none certify.
pub fn kantorovich_search(dim: usize, seed: u64, budget: usize) -> Result<KantorovichSearch> {
    let out = kantorovich_scan(dim, seed, budget)?;
    if out.hits.is_empty() {
        return Err(RadlabError::NoHitsInBudget {
            budget,
            best_m: out.best_m,
        });
    }
    Ok(out)
}

/// Like [`kantorovich_search`] but returns the statistics even with no hits.
pub fn kantorovich_scan(dim: usize, seed: u64, budget: usize) -> Result<KantorovichSearch> {
    if budget == 0 {
        return Err(RadlabError::Config("search budget must be at least 1".into()));
    }
    check_dim(dim)?;
    let mut out = KantorovichSearch {
        hits: Vec::new(),
        candidates: 0,
        non_invertible: 0,
        best_m: f64::NEG_INFINITY,
    };
    for i in 0..budget as u64 {
        let t = generate_one(Family::KantorovichSearch, dim, seed, i)?;
        out.candidates += 1;
        let (forward, backward) = match kantorovich_levels(&t) {
            Ok(levels) => levels,
            Err(RadlabError::NotInvertible { .. }) => {
                out.non_invertible += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        out.best_m = out.best_m.max(forward).max(backward);
        if forward.max(backward) > 1.0 + KANTOROVICH_MARGIN {
            if let Some(cert) = certify_kantorovich(&t)? {
                out.hits.push((t, cert));
            }
        }
    }
    Ok(out)
}
