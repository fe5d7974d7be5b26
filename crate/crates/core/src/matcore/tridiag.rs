//! Eigenvalues-only path for small Hermitian matrices: Householder
//! reduction to real symmetric tridiagonal form followed by implicit QL.
//! Used on hot loops (angle sweeps) where eigenvectors are not needed.

use super::C64;
use crate::error::{RadlabError, Result};

const QL_MAX_SWEEPS: usize = 60;

/// Smallest and largest eigenvalue of the Hermitian matrix stored
/// row-major in `a` (n×n, full storage). `a` is overwritten.
pub(crate) fn hermitian_extremes(a: &mut [C64], n: usize) -> Result<(f64, f64)> {
    match n {
        0 => Ok((0.0, 0.0)),
        1 => Ok((a[0].re, a[0].re)),
        2 => {
            let p = a[0].re;
            let q = a[3].re;
            let mid = 0.5 * (p + q);
            let rad = (0.5 * (p - q)).hypot(a[2].norm());
            Ok((mid - rad, mid + rad))
        }
        _ => {
            let mut d = vec![0.0; n];
            let mut e = vec![0.0; n];
            tridiagonalize(a, n, &mut d, &mut e);
            tql_eigenvalues(&mut d, &mut e)?;
            let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok((lo, hi))
        }
    }
}

/// All eigenvalues, ascending.
#[allow(dead_code)]
pub(crate) fn hermitian_eigenvalues(a: &mut [C64], n: usize) -> Result<Vec<f64>> {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(a, n, &mut d, &mut e);
    tql_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction. On return `d` holds the diagonal and `e[k]` the
/// modulus of the (k+1, k) entry; `e[n-1] = 0`. Dropping the phases of the
/// off-diagonal is a diagonal unitary similarity, so the spectrum is kept.
fn tridiagonalize(a: &mut [C64], n: usize, d: &mut [f64], e: &mut [f64]) {
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let norm = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[lo * n + k];
        let x0_abs = x0.norm();
        let phase = if x0_abs == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0_abs
        };
        // v = x - alpha e1 with alpha = -phase * norm
        for i in lo..n {
            v[i] = a[i * n + k];
        }
        v[lo] = x0 + phase * norm;
        let vnorm2 = 2.0 * norm * (norm + x0_abs);
        let tau = 2.0 / vnorm2;

        // p = tau * A v on the trailing block
        let mut vp = 0.0;
        for i in lo..n {
            let mut s = C64::new(0.0, 0.0);
            for j in lo..n {
                s += a[i * n + j] * v[j];
            }
            p[i] = s * tau;
            vp += (v[i].conj() * p[i]).re;
        }
        let kk = 0.5 * tau * vp;
        for i in lo..n {
            p[i] -= v[i] * kk;
        }
        // A <- A - v q* - q v*
        for i in lo..n {
            for j in lo..n {
                a[i * n + j] -= v[i] * p[j].conj() + p[i] * v[j].conj();
            }
        }
        e[k] = norm;
    }
    for i in 0..n {
        d[i] = a[i * n + i].re;
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)].norm();
    }
    e[n - 1] = 0.0;
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal
/// matrix; `e[i]` couples `d[i]` and `d[i+1]`. Eigenvalues land in `d`.
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(RadlabError::DidNotConverge);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
