//! Numerical radius w(T) = sup_{‖x‖=1} |⟨Tx, x⟩|.
//!
//! Two independent engines:
//!
//! * rotation: w(T) = max_θ λ_max(H_θ) with H_θ = (e^{iθ}T + e^{-iθ}T*)/2.
//!   A 720-point angle grid brackets the maximum and golden-section search
//!   refines it to an angle tolerance of 1e-10.
//! * ascent: a monotone fixed-point iteration on the unit sphere from
//!   seeded random starts. It never touches an eigensolver and always
//!   returns a lower bound on w(T).

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{domain, RadlabError, Result};
use crate::matcore::{self, tridiag, CVector, ComplexMatrix, HermitianMatrix, C64};

pub const GRID_ANGLES: usize = 720;
pub const ANGLE_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-10;
const MAX_REFINED_PEAKS: usize = 8;

pub const ASCENT_TOL: f64 = 1e-12;
pub const ASCENT_MAX_ITER: usize = 5000;
/// Iterations every start gets before the best are refined.
pub const ASCENT_SCREEN_ITER: usize = 100;
/// Starts that are run to convergence.
pub const ASCENT_FINALISTS: usize = 4;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusMethod {
    Rotation,
    Ascent,
}

#[derive(Clone, Debug)]
pub struct RadiusResult {
    pub value: f64,
    /// Maximizing angle in [0, 2π). For the ascent engine this is the
    /// angle whose rotated Hermitian part the witness is a fixed point of.
    pub theta: f64,
    pub witness: CVector,
    pub method: RadiusMethod,
}

/// H_θ = cos θ · Re(T) − sin θ · Im(T), where Re(T) = (T+T*)/2 and
/// Im(T) = (T−T*)/(2i). Both parts are stored exactly Hermitian.
pub(crate) struct RotatedHermitian {
    n: usize,
    re_part: Vec<C64>,
    im_part: Vec<C64>,
    work: Vec<C64>,
}

impl RotatedHermitian {
    pub(crate) fn new(t: &ComplexMatrix) -> Self {
        let n = t.dim();
        let half = C64::new(0.5, 0.0);
        let minus_half_i = C64::new(0.0, -0.5);
        let mut re_part = vec![C64::new(0.0, 0.0); n * n];
        let mut im_part = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let a = t.get(i, j);
                let b = t.get(j, i).conj();
                re_part[i * n + j] = (a + b) * half;
                im_part[i * n + j] = (a - b) * minus_half_i;
            }
        }
        Self {
            n,
            re_part,
            im_part,
            work: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    fn fill(&mut self, theta: f64) {
        let (s, c) = theta.sin_cos();
        for ((w, a), b) in self.work.iter_mut().zip(&self.re_part).zip(&self.im_part) {
            *w = a * c - b * s;
        }
    }

    /// (λ_min, λ_max) of H_θ.
    pub(crate) fn extremes(&mut self, theta: f64) -> Result<(f64, f64)> {
        self.fill(theta);
        tridiag::hermitian_extremes(&mut self.work, self.n)
    }

    pub(crate) fn lambda_max(&mut self, theta: f64) -> Result<f64> {
        Ok(self.extremes(theta)?.1)
    }

    pub(crate) fn matrix(&mut self, theta: f64) -> HermitianMatrix {
        self.fill(theta);
        let n = self.n;
        HermitianMatrix::from_symmetrized(nalgebra::DMatrix::from_fn(n, n, |i, j| {
            self.work[i * n + j]
        }))
    }
}

fn grid_angle(j: usize) -> f64 {
    2.0 * PI * j as f64 / GRID_ANGLES as f64
}

/// Golden-section maximization of `f` on [a, b]; returns the best
/// evaluated (θ, f(θ)) including the supplied centre sample.
fn golden_max(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    centre: (f64, f64),
) -> Result<(f64, f64)> {
    // strict improvement only, so flat tops keep the grid angle
    fn consider(theta: f64, value: f64, best: &mut (f64, f64)) {
        if value > best.1 {
            *best = (theta, value);
        }
    }
    let mut best = centre;
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    while b - a > ANGLE_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1)?;
            consider(x1, f1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2)?;
            consider(x2, f2, &mut best);
        }
    }
    Ok(best)
}

/// (value, θ*) from the rotation engine.
fn rotation_maximum(engine: &mut RotatedHermitian) -> Result<(f64, f64)> {
    // λ_max(H_{θ+π}) = −λ_min(H_θ): half the grid is free.
    let half = GRID_ANGLES / 2;
    let mut grid = vec![0.0; GRID_ANGLES];
    for j in 0..half {
        let (lo, hi) = engine.extremes(grid_angle(j))?;
        grid[j] = hi;
        grid[j + half] = -lo;
    }
    let top = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = top - TIE_TOL * top.abs().max(1.0);

    // Local maxima of the cyclic grid that are within the tie window,
    // smallest angle first.
    let peaks: Vec<usize> = (0..GRID_ANGLES)
        .filter(|&j| {
            let prev = grid[(j + GRID_ANGLES - 1) % GRID_ANGLES];
            let next = grid[(j + 1) % GRID_ANGLES];
            grid[j] >= cutoff && grid[j] >= prev && grid[j] >= next
        })
        .take(MAX_REFINED_PEAKS)
        .collect();

    let step = grid_angle(1);
    let mut refined = Vec::with_capacity(peaks.len());
    for &j in &peaks {
        let centre = grid_angle(j);
        let mut f = |theta: f64| engine.lambda_max(theta);
        let (theta, value) = golden_max(&mut f, centre - step, centre + step, (centre, grid[j]))?;
        let mut theta = theta.rem_euclid(2.0 * PI);
        if 2.0 * PI - theta <= ANGLE_TOL {
            theta = 0.0;
        }
        refined.push((theta, value));
    }
    let value = refined.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * value.abs().max(1.0);
    // Peaks are in ascending grid order, so the first one in the tie
    // window has the smallest angle.
    let theta = refined
        .iter()
        .find(|p| p.1 >= value - tol)
        .map(|p| p.0)
        .ok_or(RadlabError::DidNotConverge)?;
    Ok((value, theta))
}

/// w(T) by the rotation engine, with witness vector.
pub fn numerical_radius(t: &ComplexMatrix) -> Result<RadiusResult> {
    let mut engine = RotatedHermitian::new(t);
    let (value, theta) = rotation_maximum(&mut engine)?;
    let h = engine.matrix(theta);
    let eig = matcore::herm_eig(&h)?;
    Ok(RadiusResult {
        value,
        theta,
        witness: eig.vector(0),
        method: RadiusMethod::Rotation,
    })
}

/// w(T) by the rotation engine, value only.
pub fn numerical_radius_value(t: &ComplexMatrix) -> Result<f64> {
    let mut engine = RotatedHermitian::new(t);
    Ok(rotation_maximum(&mut engine)?.0)
}

/// Numerical radius over real unit vectors, for real T: the spectral
/// radius of the symmetric part (T + Tᵀ)/2.
pub fn real_numerical_radius(t: &ComplexMatrix) -> Result<f64> {
    if !t.is_real() {
        return Err(RadlabError::ComplexInput);
    }
    let sym = HermitianMatrix::from_symmetrized(t.as_dmatrix().clone());
    sym.norm()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    loop {
        let x = CVector::from_fn(n, |_, _| {
            C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let norm = x.norm();
        if norm > 1e-8 {
            return x / C64::new(norm, 0.0);
        }
    }
}

/// Projected ascent oracle for w(T).
///
/// Each step maximizes the linearization Re(e^{-iφ}⟨Tx, x⟩) with
/// φ = arg⟨Tx, x⟩ by one power step on the shifted matrix
/// H_{-φ} + σI, σ = sqrt(‖T‖₁‖T‖_∞) ≥ ‖T‖, which is positive semidefinite.
/// The shift keeps the step monotone in |⟨Tx, x⟩|. The iteration can stall
/// at a local maximum of θ ↦ λ_max(H_θ), so every random start gets a short
/// screening ascent and the best few are run to convergence.
pub fn numerical_radius_ascent(t: &ComplexMatrix, restarts: usize, seed: u64) -> Result<RadiusResult> {
    if restarts == 0 {
        return Err(domain("ascent needs at least one restart"));
    }
    let n = t.dim();
    let m = t.as_dmatrix();
    let adj = m.adjoint();
    let col_sum = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let row_sum = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let shift = (col_sum * row_sum).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ascend = |x: CVector, iters: usize| -> (f64, C64, CVector) {
        let mut x = x;
        let mut z = crate::matcore::inner(&(m * &x), &x);
        let mut value = z.norm();
        for _ in 0..iters {
            let phase = if value > 0.0 { z / value } else { C64::new(1.0, 0.0) };
            // (e^{-iφ}T + e^{iφ}T*)/2 x + σx
            let y = (m * &x) * (phase.conj() * 0.5) + (&adj * &x) * (phase * 0.5)
                + &x * C64::new(shift, 0.0);
            let norm = y.norm();
            if norm == 0.0 {
                break;
            }
            let next = y / C64::new(norm, 0.0);
            let next_z = crate::matcore::inner(&(m * &next), &next);
            let next_value = next_z.norm();
            let done = (next_value - value).abs() <= ASCENT_TOL * value.max(1.0);
            if next_value >= value {
                x = next;
                z = next_z;
                value = next_value;
            }
            if done {
                break;
            }
        }
        (value, z, x)
    };
    // Screen every start with a short ascent, then converge the best few.
    let mut starts: Vec<(f64, C64, CVector)> = (0..restarts)
        .map(|_| ascend(random_unit(n, &mut rng), ASCENT_SCREEN_ITER))
        .collect();
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: Option<(f64, f64, CVector)> = None;
    for (_, _, x) in starts.into_iter().take(ASCENT_FINALISTS) {
        let (value, z, x) = ascend(x, ASCENT_MAX_ITER);
        if best.as_ref().is_none_or(|b| value > b.0) {
            let theta = (-z.arg()).rem_euclid(2.0 * PI);
            best = Some((value, theta, x));
        }
    }
    let (value, theta, witness) = best.expect("restarts >= 1");
    Ok(RadiusResult {
        value,
        theta,
        witness,
        method: RadiusMethod::Ascent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FovPoint {
    pub theta: f64,
    pub point: C64,
}

/// Boundary samples ⟨T x_j, x_j⟩ where x_j is the top eigenvector of
/// H_{θ_j}, θ_j = 2πj/k.
pub fn fov_boundary(t: &ComplexMatrix, k: usize) -> Result<Vec<FovPoint>> {
    if k < 3 {
        return Err(domain(format!("need at least 3 boundary samples, got {k}")));
    }
    let mut engine = RotatedHermitian::new(t);
    (0..k)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / k as f64;
            let eig = matcore::herm_eig(&engine.matrix(theta))?;
            let x = eig.vector(0);
            Ok(FovPoint {
                theta,
                point: t.quadratic_form(&x)?,
            })
        })
        .collect()
}

/// CSV with header `theta,re,im`, one row per sample.
pub fn write_fov_csv<W: Write>(points: &[FovPoint], out: W) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "re", "im"])?;
    for p in points {
        w.write_record([
            format!("{:.17e}", p.theta),
            format!("{:.17e}", p.point.re),
            format!("{:.17e}", p.point.im),
        ])?;
    }
    Ok(w)
}

pub fn export_fov_csv(points: &[FovPoint], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = write_fov_csv(points, file)?;
    w.flush()?;
    Ok(())
}
