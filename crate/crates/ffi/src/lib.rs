//! C ABI over `covmap`.
//!
//! Objects cross the boundary as opaque heap handles (`CovmapMatrix`,
//! `CovmapCoefficients`) that the caller releases with the matching `*_free`.
//! Every fallible call returns a `CovmapStatus`; on failure the message is
//! available from `covmap_last_error` on the same thread. Complex numbers are
//! passed as interleaved `(re, im)` doubles, matrices row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use covmap::classify;
use covmap::covmap2::{self, CovariantCoefficients};
use covmap::error::Error;
use covmap::linalg::{ComplexMatrix, Tolerance};
use covmap::norms::{self, CbMethod, CbValue};
use covmap::operators::RngSeed;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovmapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    TraceTerms = 4,
    Uniqueness = 5,
    Numerical = 6,
    Panic = 7,
}

/// Dense complex matrix handle.
pub struct CovmapMatrix(ComplexMatrix);

/// Two-copy covariant coefficient handle.
pub struct CovmapCoefficients(CovariantCoefficients);

pub const COVMAP_SELF_ADJOINT: u32 = 1;
pub const COVMAP_POSITIVE: u32 = 1 << 1;
pub const COVMAP_COMPLETELY_POSITIVE: u32 = 1 << 2;
pub const COVMAP_BROADCASTING: u32 = 1 << 3;
pub const COVMAP_PERMUTATION_INVARIANT: u32 = 1 << 4;
pub const COVMAP_CLASSICALLY_CONSISTENT: u32 = 1 << 5;
pub const COVMAP_VIRTUAL_BROADCASTER: u32 = 1 << 6;
/// Set when the CP verdict came from a numerical Choi check rather than the closed form.
pub const COVMAP_CP_NUMERICAL: u32 = 1 << 7;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovmapCbKind {
    Exact = 0,
    UpperBound = 1,
    LowerBound = 2,
    Bracket = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovmapCbMethod {
    PermutationInvariant = 0,
    CornerBound = 1,
    MonteCarlo = 2,
}

/// cb-norm result. `lower`/`upper` are NaN when that side is unknown.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CovmapCbNorm {
    pub kind: CovmapCbKind,
    pub method: CovmapCbMethod,
    pub lower: f64,
    pub upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CovmapStatus {
    match e {
        Error::DimensionMismatch { .. }
        | Error::InvalidDimension(_)
        | Error::IndexOutOfRange { .. }
        | Error::GaugeAmbiguous => CovmapStatus::Dimension,
        Error::TraceTermsPresent { .. } => CovmapStatus::TraceTerms,
        Error::UniquenessUnavailable { .. } => CovmapStatus::Uniqueness,
        Error::NotHermitian { .. } => CovmapStatus::Numerical,
        _ => CovmapStatus::InvalidArgument,
    }
}

struct Fail(CovmapStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CovmapStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording failures and converting panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CovmapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CovmapStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CovmapStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn tolerance(abs: f64, rel: f64) -> Result<Tolerance, Fail> {
    Ok(Tolerance::new(abs, rel)?)
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn covmap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2·rows·cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut CovmapMatrix,
) -> CovmapStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(CovmapStatus::Dimension, "matrix too large".into()))?;
        let raw = std::slice::from_raw_parts(data, 2 * n);
        let entries = raw
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        write_out(out, CovmapMatrix(ComplexMatrix::new(rows, cols, entries)?))
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn covmap_matrix_free(m: *mut CovmapMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_matrix_shape(
    m: *const CovmapMatrix,
    rows: *mut usize,
    cols: *mut usize,
) -> CovmapStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("shape output"));
        }
        *rows = m.0.rows();
        *cols = m.0.cols();
        Ok(())
    })
}

/// Copies the entries as interleaved doubles into `out`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn covmap_matrix_data(
    m: *const CovmapMatrix,
    out: *mut f64,
    len: usize,
) -> CovmapStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let data = m.0.as_slice();
        if len < 2 * data.len() {
            return Err(Fail(
                CovmapStatus::Dimension,
                format!("buffer holds {len} doubles, need {}", 2 * data.len()),
            ));
        }
        let out = std::slice::from_raw_parts_mut(out, 2 * data.len());
        for (pair, z) in out.chunks_exact_mut(2).zip(data) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Creates coefficients `(l1, …, l6)` from 12 interleaved doubles.
///
/// # Safety
/// `coeffs` must point to 12 readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_coefficients_new(
    d: usize,
    coeffs: *const f64,
    out: *mut *mut CovmapCoefficients,
) -> CovmapStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let raw = std::slice::from_raw_parts(coeffs, 12);
        let mut l = [Complex64::default(); 6];
        for (z, p) in l.iter_mut().zip(raw.chunks_exact(2)) {
            *z = Complex64::new(p[0], p[1]);
        }
        write_out(out, CovmapCoefficients(CovariantCoefficients::new(d, l)?))
    })
}

/// # Safety
/// `c` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn covmap_coefficients_free(c: *mut CovmapCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Writes `d` and the 12 interleaved coefficient doubles.
///
/// # Safety
/// `c` must be a live handle; `d` must be writable and `coeffs` must point to 12 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn covmap_coefficients_get(
    c: *const CovmapCoefficients,
    d: *mut usize,
    coeffs: *mut f64,
) -> CovmapStatus {
    guard(|| {
        let c = deref(c, "coefficients")?;
        if d.is_null() || coeffs.is_null() {
            return Err(null("output"));
        }
        *d = c.0.d();
        let out = std::slice::from_raw_parts_mut(coeffs, 12);
        for (pair, z) in out.chunks_exact_mut(2).zip(c.0.coeffs()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// `Φ(X)` as a new `d² × d²` matrix.
///
/// # Safety
/// `c` and `x` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_apply(
    c: *const CovmapCoefficients,
    x: *const CovmapMatrix,
    out: *mut *mut CovmapMatrix,
) -> CovmapStatus {
    guard(|| {
        let c = deref(c, "coefficients")?;
        let x = deref(x, "x")?;
        write_out(out, CovmapMatrix(covmap2::apply(&c.0, &x.0)?))
    })
}

/// The `d⁴ × d²` superoperator matrix of the map.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_realize(
    c: *const CovmapCoefficients,
    out: *mut *mut CovmapMatrix,
) -> CovmapStatus {
    guard(|| {
        let c = deref(c, "coefficients")?;
        write_out(out, CovmapMatrix(covmap2::realize_superoperator(&c.0)))
    })
}

/// Coefficients of a superoperator: exact extraction for `d ≥ 3`, the
/// gauge-reduced least-squares fit at `d = 2`. `residual` may be null.
///
/// # Safety
/// `superop` must be a live handle; `out` must be writable; `residual` null or writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_extract(
    superop: *const CovmapMatrix,
    out: *mut *mut CovmapCoefficients,
    residual: *mut f64,
) -> CovmapStatus {
    guard(|| {
        let s = deref(superop, "superoperator")?;
        let (c, r) = covmap2::extract_or_fit(&s.0)?;
        write_out(out, CovmapCoefficients(c))?;
        if !residual.is_null() {
            *residual = r;
        }
        Ok(())
    })
}

/// Classification verdicts as a bit set of `COVMAP_*` flags.
///
/// # Safety
/// `c` must be a live handle; `flags` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_classify(
    c: *const CovmapCoefficients,
    tol_abs: f64,
    tol_rel: f64,
    flags: *mut u32,
) -> CovmapStatus {
    guard(|| {
        let c = deref(c, "coefficients")?;
        if flags.is_null() {
            return Err(null("flags"));
        }
        let r = classify::classify(&c.0, tolerance(tol_abs, tol_rel)?);
        let bits = [
            (r.self_adjoint.verdict, COVMAP_SELF_ADJOINT),
            (r.positive.verdict, COVMAP_POSITIVE),
            (
                r.completely_positive.verdict.is_cp(),
                COVMAP_COMPLETELY_POSITIVE,
            ),
            (r.broadcasting.verdict, COVMAP_BROADCASTING),
            (
                r.permutation_invariant.verdict,
                COVMAP_PERMUTATION_INVARIANT,
            ),
            (
                r.classically_consistent.verdict,
                COVMAP_CLASSICALLY_CONSISTENT,
            ),
            (r.virtual_broadcaster.verdict, COVMAP_VIRTUAL_BROADCASTER),
            (
                matches!(
                    r.completely_positive.verdict,
                    classify::CpVerdict::NumericalOnly { .. }
                ),
                COVMAP_CP_NUMERICAL,
            ),
        ];
        *flags = bits
            .iter()
            .filter(|(on, _)| *on)
            .fold(0, |acc, (_, b)| acc | b);
        Ok(())
    })
}

/// cb-norm of a trace-free map; `TraceTerms` otherwise.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covmap_cb_norm(
    c: *const CovmapCoefficients,
    samples: usize,
    seed: u64,
    tol_abs: f64,
    tol_rel: f64,
    out: *mut CovmapCbNorm,
) -> CovmapStatus {
    guard(|| {
        let c = deref(c, "coefficients")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = norms::cb_norm(&c.0, samples, RngSeed(seed), tolerance(tol_abs, tol_rel)?)?;
        let kind = match r.value {
            CbValue::Exact(_) => CovmapCbKind::Exact,
            CbValue::UpperBound(_) => CovmapCbKind::UpperBound,
            CbValue::LowerBound(_) => CovmapCbKind::LowerBound,
            CbValue::Bracket { .. } => CovmapCbKind::Bracket,
        };
        let method = match r.method {
            CbMethod::PermutationInvariant => CovmapCbMethod::PermutationInvariant,
            CbMethod::CornerBound => CovmapCbMethod::CornerBound,
            CbMethod::MonteCarlo => CovmapCbMethod::MonteCarlo,
        };
        *out = CovmapCbNorm {
            kind,
            method,
            lower: r.value.lower().unwrap_or(f64::NAN),
            upper: r.value.upper().unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
