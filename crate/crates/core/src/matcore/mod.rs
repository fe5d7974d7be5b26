//! Dense complex linear algebra kernel.
//!
//! Everything downstream works on [`ComplexMatrix`] (a square, finite,
//! at most 64×64 complex matrix) and [`HermitianMatrix`]. Functional
//! calculus goes through a Hermitian eigendecomposition; norms in bound
//! formulas are always the spectral norm.

mod json;
pub(crate) mod tridiag;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{domain, RadlabError, Result};

pub use json::MatrixJson;

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;

/// Largest supported dimension.
pub const MAX_DIM: usize = 64;

/// Relative threshold below which negative eigenvalues of a nominally PSD
/// matrix are treated as roundoff and clamped to zero.
pub const PSD_CLAMP_REL: f64 = 1e-12;

/// Relative Hermitian asymmetry tolerance.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

const EIG_MAX_ITER: usize = 10_000;

/// ⟨x, y⟩, linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

pub fn vec_norm(x: &CVector) -> f64 {
    x.norm()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        let n = data.nrows();
        if data.ncols() != n {
            return Err(RadlabError::DimensionMismatch {
                expected: n,
                got: data.ncols(),
            });
        }
        if n == 0 || n > MAX_DIM {
            return Err(RadlabError::DimensionOutOfRange(n));
        }
        for j in 0..n {
            for i in 0..n {
                let z = data[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(RadlabError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Internal constructor for results of arithmetic on already-validated
    /// matrices.
    pub(crate) fn from_raw(data: DMatrix<C64>) -> Self {
        debug_assert!(data.is_square());
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(RadlabError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_raw(self.data.adjoint())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_raw(&self.data * &other.data))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_raw(&self.data + &other.data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_raw(&self.data - &other.data))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_raw(self.data.map(|z| z * c))
    }

    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        if x.len() != self.dim() {
            return Err(RadlabError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(&self.data * x)
    }

    /// T*T as a Hermitian matrix.
    pub fn gram(&self) -> HermitianMatrix {
        HermitianMatrix::from_symmetrized(self.data.adjoint() * &self.data)
    }

    /// TT* as a Hermitian matrix.
    pub fn cogram(&self) -> HermitianMatrix {
        HermitianMatrix::from_symmetrized(&self.data * self.data.adjoint())
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨Tx, x⟩.
    pub fn quadratic_form(&self, x: &CVector) -> Result<C64> {
        Ok(inner(&self.apply(x)?, x))
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(RadlabError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

/// A Hermitian matrix. The stored matrix is exactly Hermitian; the
/// asymmetry of the input it was built from is kept for reference.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    base: ComplexMatrix,
    asymmetry: f64,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let asymmetry = asymmetry(&m.data);
        let tol = HERMITIAN_REL_TOL * m.max_abs().max(1.0);
        if asymmetry > tol {
            return Err(RadlabError::NotHermitian { asymmetry, tol });
        }
        let mut h = Self::from_symmetrized(m.data);
        h.asymmetry = asymmetry;
        Ok(h)
    }

    /// Projects onto the Hermitian part without checking.
    pub(crate) fn from_symmetrized(m: DMatrix<C64>) -> Self {
        let n = m.nrows();
        let mut h = m;
        for j in 0..n {
            h[(j, j)] = C64::new(h[(j, j)].re, 0.0);
            for i in (j + 1)..n {
                let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
                h[(i, j)] = avg;
                h[(j, i)] = avg.conj();
            }
        }
        Self {
            base: ComplexMatrix::from_raw(h),
            asymmetry: 0.0,
        }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let d: Vec<C64> = d.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(ComplexMatrix::from_diagonal(&d)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.base
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.base
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.base.check_same_dim(&other.base)?;
        Ok(Self::from_symmetrized(&self.base.data + &other.base.data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.base.check_same_dim(&other.base)?;
        Ok(Self::from_symmetrized(&self.base.data - &other.base.data))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_symmetrized(self.base.data.map(|z| z * c))
    }

    /// Re⟨Mx, x⟩ (the imaginary part vanishes for Hermitian M).
    pub fn quadratic_form(&self, x: &CVector) -> Result<f64> {
        Ok(self.base.quadratic_form(x)?.re)
    }

    /// Largest and smallest eigenvalue, without eigenvectors.
    pub fn extreme_eigenvalues(&self) -> Result<(f64, f64)> {
        let n = self.dim();
        let mut buf: Vec<C64> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                buf.push(self.base.data[(i, j)]);
            }
        }
        let (lo, hi) = tridiag::hermitian_extremes(&mut buf, n)?;
        Ok((hi, lo))
    }

    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.extreme_eigenvalues()?.0)
    }

    pub fn lambda_min(&self) -> Result<f64> {
        Ok(self.extreme_eigenvalues()?.1)
    }

    /// Spectral norm, max |λ|.
    pub fn norm(&self) -> Result<f64> {
        let (hi, lo) = self.extreme_eigenvalues()?;
        Ok(hi.abs().max(lo.abs()))
    }
}

fn asymmetry(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition M = V diag(λ) V* with λ sorted descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        reconstruct(&self.vectors, &self.values)
    }

    /// Column `k` of V.
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.data.column(k).into_owned()
    }
}

fn reconstruct(v: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    let mut scaled = v.data.clone();
    for (k, &lam) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(lam);
    }
    ComplexMatrix::from_raw(scaled * v.data.adjoint())
}

pub fn herm_eig(m: &HermitianMatrix) -> Result<HermitianEigen> {
    let n = m.dim();
    let eig = nalgebra::SymmetricEigen::try_new(m.base.data.clone(), f64::EPSILON, EIG_MAX_ITER)
        .ok_or(RadlabError::DidNotConverge)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::from_raw(vectors),
    })
}

/// Spectrum of a PSD matrix with roundoff-level negative eigenvalues
/// clamped to zero.
#[derive(Clone, Debug)]
pub struct PsdSpectrum {
    eig: HermitianEigen,
}

impl PsdSpectrum {
    pub fn new(m: &HermitianMatrix) -> Result<Self> {
        let mut eig = herm_eig(m)?;
        let scale = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let threshold = PSD_CLAMP_REL * scale;
        for v in eig.values.iter_mut() {
            if *v < -threshold {
                return Err(RadlabError::NegativeEigenvalue {
                    value: *v,
                    threshold: -threshold,
                });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { eig })
    }

    pub fn values(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    /// V diag(λ^p) V* for p > 0.
    pub fn power(&self, p: f64) -> Result<HermitianMatrix> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(domain(format!("matrix power exponent must be positive, got {p}")));
        }
        let powered: Vec<f64> = self.eig.values.iter().map(|&l| l.powf(p)).collect();
        Ok(HermitianMatrix::from_symmetrized(
            reconstruct(&self.eig.vectors, &powered).data,
        ))
    }

    /// V diag(λ^{-p}) V* for p > 0; requires a positive definite spectrum.
    pub fn inverse_power(&self, p: f64) -> Result<HermitianMatrix> {
        if !(p > 0.0) {
            return Err(domain(format!("inverse power exponent must be positive, got {p}")));
        }
        let min = self.eig.values.last().copied().unwrap_or(0.0);
        if !(min > 0.0) {
            return Err(RadlabError::NotInvertible {
                sigma_min: min,
                threshold: 0.0,
            });
        }
        let powered: Vec<f64> = self.eig.values.iter().map(|&l| l.powf(-p)).collect();
        Ok(HermitianMatrix::from_symmetrized(
            reconstruct(&self.eig.vectors, &powered).data,
        ))
    }
}

/// |T| = (T*T)^{1/2}.
pub fn abs_value(t: &ComplexMatrix) -> Result<HermitianMatrix> {
    PsdSpectrum::new(&t.gram())?.power(0.5)
}

/// M^p for PSD M and p > 0.
pub fn mat_power(m: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let spectrum = PsdSpectrum::new(m)?;
    if p == 1.0 {
        return Ok(m.clone());
    }
    spectrum.power(p)
}

/// Largest singular value.
pub fn op_norm(t: &ComplexMatrix) -> Result<f64> {
    Ok(t.gram().lambda_max()?.max(0.0).sqrt())
}

/// Smallest singular value via SVD (accurate far below sqrt(eps)·‖T‖).
pub fn min_singular_value(t: &ComplexMatrix) -> Result<f64> {
    let svd = nalgebra::SVD::try_new(t.data.clone(), false, false, f64::EPSILON, EIG_MAX_ITER)
        .ok_or(RadlabError::DidNotConverge)?;
    Ok(svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// A ≤ B in the Loewner order: λ_min(B − A) ≥ −tol.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(b.sub(a)?.lambda_min()? >= -tol)
}
