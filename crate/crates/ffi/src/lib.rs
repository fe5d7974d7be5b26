//! C ABI over the radlab core: opaque matrix handles, status codes and a
//! thread-local last-error message. The declarations live in
//! `include/radlab.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use radlab::bounds::{self, BoundId, BoundParams, Operator};
use radlab::genlab::{self, Family};
use radlab::{matcore, numrad, ComplexMatrix, RadlabError, C64};

pub const RADLAB_OK: i32 = 0;
pub const RADLAB_ERR_NULL_POINTER: i32 = 1;
pub const RADLAB_ERR_INVALID_ARGUMENT: i32 = 2;
pub const RADLAB_ERR_PARSE: i32 = 3;
pub const RADLAB_ERR_NUMERICAL: i32 = 4;
pub const RADLAB_ERR_NOT_INVERTIBLE: i32 = 5;
pub const RADLAB_ERR_HYPOTHESIS: i32 = 6;
pub const RADLAB_ERR_COMPLEX_INPUT: i32 = 7;
pub const RADLAB_ERR_BUFFER_TOO_SMALL: i32 = 8;
pub const RADLAB_ERR_PANIC: i32 = 9;

/// Opaque handle to a square complex matrix.
pub struct RadlabMatrix {
    inner: ComplexMatrix,
}

/// One inequality instance produced by a bound.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RadlabBoundRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// NaN when the bound has no explicit form.
    pub explicit_bound: f64,
    /// Position in a chain of inequalities, -1 for a single inequality.
    pub link: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &RadlabError) -> i32 {
    match e {
        RadlabError::Parse(_) => RADLAB_ERR_PARSE,
        RadlabError::NotHermitian { .. }
        | RadlabError::DidNotConverge
        | RadlabError::NegativeEigenvalue { .. } => RADLAB_ERR_NUMERICAL,
        RadlabError::NotInvertible { .. } => RADLAB_ERR_NOT_INVERTIBLE,
        RadlabError::HypothesisFailed(_) | RadlabError::NoHitsInBudget { .. } => RADLAB_ERR_HYPOTHESIS,
        RadlabError::ComplexInput => RADLAB_ERR_COMPLEX_INPUT,
        _ => RADLAB_ERR_INVALID_ARGUMENT,
    }
}

enum Failure {
    Status(i32, String),
    Core(RadlabError),
}

impl From<RadlabError> for Failure {
    fn from(e: RadlabError) -> Self {
        Failure::Core(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(RADLAB_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code and the
/// thread's last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RADLAB_OK,
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            RADLAB_ERR_PANIC
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const RadlabMatrix) -> Result<&'a RadlabMatrix, Failure> {
    m.as_ref().ok_or_else(|| null("matrix"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Status(RADLAB_ERR_INVALID_ARGUMENT, format!("{what} is not valid UTF-8")))
}

fn boxed(m: ComplexMatrix) -> *mut RadlabMatrix {
    Box::into_raw(Box::new(RadlabMatrix { inner: m }))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn radlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn radlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an n×n matrix from row-major real and imaginary parts. `im` may
/// be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to n·n doubles; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_new(
    n: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut RadlabMatrix,
) -> i32 {
    guard(|| {
        let out = out_ref(out, "out")?;
        if re.is_null() {
            return Err(null("re"));
        }
        let len = n
            .checked_mul(n)
            .filter(|_| (1..=matcore::MAX_DIM).contains(&n))
            .ok_or(RadlabError::DimensionOutOfRange(n))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, len));
        let rows: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| C64::new(re[i * n + j], im.map_or(0.0, |im| im[i * n + j])))
                    .collect()
            })
            .collect();
        *out = boxed(ComplexMatrix::from_rows(&rows)?);
        Ok(())
    })
}

/// Parses `{"n": .., "re": [[..]], "im": [[..]]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_from_json(json: *const c_char, out: *mut *mut RadlabMatrix) -> i32 {
    guard(|| {
        let out = out_ref(out, "out")?;
        let json = str_arg(json, "json")?;
        *out = boxed(ComplexMatrix::from_json_str(json)?);
        Ok(())
    })
}

/// Draws matrix `index` of a seeded random family (e.g. "ginibre").
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_generate(
    family: *const c_char,
    n: usize,
    seed: u64,
    index: u64,
    out: *mut *mut RadlabMatrix,
) -> i32 {
    guard(|| {
        let out = out_ref(out, "out")?;
        let family: Family = str_arg(family, "family")?.parse()?;
        *out = boxed(genlab::generate_one(family, n, seed, index)?);
        Ok(())
    })
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must come from a radlab constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_free(m: *mut RadlabMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_dim(m: *const RadlabMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.dim())
}

/// Entry (i, j) of `m`.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_entry(
    m: *const RadlabMatrix,
    i: usize,
    j: usize,
    re: *mut f64,
    im: *mut f64,
) -> i32 {
    guard(|| {
        let m = matrix_ref(m)?;
        let (re, im) = (out_ref(re, "re")?, out_ref(im, "im")?);
        let n = m.inner.dim();
        if i >= n || j >= n {
            return Err(Failure::Status(
                RADLAB_ERR_INVALID_ARGUMENT,
                format!("entry ({i}, {j}) is outside a {n}x{n} matrix"),
            ));
        }
        let z = m.inner.get(i, j);
        (*re, *im) = (z.re, z.im);
        Ok(())
    })
}

/// w(T) by the rotation engine, with the maximizing angle.
///
/// # Safety
/// `m` must be a live handle; `w` must be valid; `theta` may be null.
#[no_mangle]
pub unsafe extern "C" fn radlab_numerical_radius(m: *const RadlabMatrix, w: *mut f64, theta: *mut f64) -> i32 {
    guard(|| {
        let m = matrix_ref(m)?;
        let w = out_ref(w, "w")?;
        let r = numrad::numerical_radius(&m.inner)?;
        *w = r.value;
        if let Some(theta) = theta.as_mut() {
            *theta = r.theta;
        }
        Ok(())
    })
}

/// w(T) by the ascent oracle with `restarts` seeded restarts.
///
/// # Safety
/// `m` must be a live handle; `w` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_numerical_radius_ascent(
    m: *const RadlabMatrix,
    restarts: usize,
    seed: u64,
    w: *mut f64,
) -> i32 {
    guard(|| {
        let m = matrix_ref(m)?;
        let w = out_ref(w, "w")?;
        *w = numrad::numerical_radius_ascent(&m.inner, restarts, seed)?.value;
        Ok(())
    })
}

/// Operator norm (largest singular value).
///
/// # Safety
/// `m` must be a live handle; `norm` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_op_norm(m: *const RadlabMatrix, norm: *mut f64) -> i32 {
    guard(|| {
        let m = matrix_ref(m)?;
        let norm = out_ref(norm, "norm")?;
        *norm = matcore::op_norm(&m.inner)?;
        Ok(())
    })
}

/// Samples k points on the boundary of the field of values into the
/// `re`/`im` arrays, each of capacity at least k.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must point to k doubles.
#[no_mangle]
pub unsafe extern "C" fn radlab_fov_boundary(m: *const RadlabMatrix, k: usize, re: *mut f64, im: *mut f64) -> i32 {
    guard(|| {
        let m = matrix_ref(m)?;
        if re.is_null() || im.is_null() {
            return Err(null("output array"));
        }
        let points = numrad::fov_boundary(&m.inner, k)?;
        let re = std::slice::from_raw_parts_mut(re, k);
        let im = std::slice::from_raw_parts_mut(im, k);
        for (j, p) in points.iter().enumerate() {
            re[j] = p.point.re;
            im[j] = p.point.im;
        }
        Ok(())
    })
}

/// Evaluates a bound by id ("th4", "eq4_aldolat", ...) on `count` operands
/// (1, 2 or 4 depending on the bound). Parameters a bound does not use are
/// ignored. Writes up to `capacity` records and the total into
/// `written`; returns RADLAB_ERR_BUFFER_TOO_SMALL when it does not fit.
///
/// # Safety
/// `bound` must be a NUL-terminated string, `operands` must point to
/// `count` live handles, `records` to `capacity` records (may be null when
/// `capacity` is 0), and `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_eval_bound(
    bound: *const c_char,
    operands: *const *const RadlabMatrix,
    count: usize,
    lambda: f64,
    alpha: f64,
    r: f64,
    records: *mut RadlabBoundRecord,
    capacity: usize,
    written: *mut usize,
) -> i32 {
    guard(|| {
        let written = out_ref(written, "written")?;
        *written = 0;
        let id: BoundId = str_arg(bound, "bound")?.parse()?;
        if operands.is_null() {
            return Err(null("operands"));
        }
        let ops = std::slice::from_raw_parts(operands, count)
            .iter()
            .map(|&m| matrix_ref(m).map(|m| Operator::new(m.inner.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let params = BoundParams { r, lambda, alpha };
        let evals = bounds::evaluate_operators(id, &ops, None, &params)?;
        *written = evals.len();
        if evals.len() > capacity || (capacity > 0 && records.is_null()) {
            return Err(Failure::Status(
                RADLAB_ERR_BUFFER_TOO_SMALL,
                format!("{id} produced {} records, capacity {capacity}", evals.len()),
            ));
        }
        let out = if evals.is_empty() { &mut [][..] } else { std::slice::from_raw_parts_mut(records, capacity) };
        for (slot, e) in out.iter_mut().zip(&evals) {
            *slot = RadlabBoundRecord {
                lhs: e.lhs,
                rhs: e.rhs,
                slack: e.slack,
                explicit_bound: e.explicit_bound.unwrap_or(f64::NAN),
                link: e.params.get("link").map_or(-1, |&l| l as i32),
            };
        }
        Ok(())
    })
}

/// The record violates at tolerance `tol`: slack < −tol·max(1, |rhs|).
#[no_mangle]
pub extern "C" fn radlab_is_violation(record: RadlabBoundRecord, tol: f64) -> bool {
    record.slack < -tol * record.rhs.abs().max(1.0)
}

/// Serializes `m` to matrix JSON. Free the result with radlab_string_free.
///
/// # Safety
/// `m` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn radlab_matrix_to_json(m: *const RadlabMatrix, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let m = matrix_ref(m)?;
        let out = out_ref(out, "out")?;
        *out = CString::new(m.inner.to_json_string())
            .map_err(|_| Failure::Status(RADLAB_ERR_PANIC, "interior NUL in JSON".into()))?
            .into_raw();
        Ok(())
    })
}

/// Releases a string returned by radlab. Null is ignored.
///
/// # Safety
/// `s` must come from radlab and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn radlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
