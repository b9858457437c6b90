//! C interface to the finsler library.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free`. Every entry point returns a [`FinslerStatus`];
//! on anything but `Ok` a message is available from
//! [`finsler_last_error`] on the same thread. Panics never cross the
//! boundary: they surface as `FINSLER_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use finsler::certs::{verify_certificate, CertError, Certificate};
use finsler::pointwise::{finsler_interval, ExtendedReal, SectionInterval, SymMatrix};
use finsler::polycore::{MatPoly, PolyError};

/// Result of every call. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinslerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or an unparsable coefficient.
    Parse = 3,
    /// Sizes, variable counts or symmetry disagree.
    Shape = 4,
    /// The certificate was read and checked, and its identity does not hold.
    Mismatch = 5,
    /// A non-finite input or an eigenvalue iteration that did not converge.
    Numeric = 6,
    Internal = 7,
}

/// Opaque symmetric matrix polynomial.
pub struct FinslerMatPoly(MatPoly);

/// Opaque certificate of any supported kind.
pub struct FinslerCertificate(Certificate);

/// Open interval `(lo, hi)`; infinite ends are `±INFINITY`. When `empty`
/// is nonzero the endpoints carry no meaning.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinslerInterval {
    pub empty: i32,
    pub lo: f64,
    pub hi: f64,
    /// Nonzero when roots nearly collide or the cell scan was inconsistent.
    pub low_confidence: i32,
}

/// First entry where a certificate identity fails; indices are one-based.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FinslerMismatch {
    pub row: usize,
    pub col: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(FinslerStatus, String);

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        let status = match e {
            PolyError::Parse(_) => FinslerStatus::Parse,
            PolyError::NonFinite(_) => FinslerStatus::Numeric,
            _ => FinslerStatus::Shape,
        };
        Failure(status, e.to_string())
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        Failure(FinslerStatus::Shape, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FinslerStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FinslerStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FinslerStatus::Internal
        }
    }
}

fn null() -> Failure {
    Failure(FinslerStatus::NullPointer, "null pointer argument".into())
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(FinslerStatus::InvalidUtf8, e.to_string()))
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure(FinslerStatus::Parse, e.to_string()))
}

fn to_f64(e: ExtendedReal) -> f64 {
    match e {
        ExtendedReal::NegInf => f64::NEG_INFINITY,
        ExtendedReal::PosInf => f64::INFINITY,
        ExtendedReal::Finite(v) => v,
    }
}

fn to_interval(iv: &SectionInterval, low_confidence: bool) -> FinslerInterval {
    FinslerInterval {
        empty: iv.is_empty() as i32,
        lo: if iv.is_empty() { f64::NAN } else { to_f64(iv.lo) },
        hi: if iv.is_empty() { f64::NAN } else { to_f64(iv.hi) },
        low_confidence: low_confidence as i32,
    }
}

/// Message for the last failing call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn finsler_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `{"n": .., "d": .., "entries": [[{"d": .., "terms": [{"exp": [..], "coef": ".."}]}]]}`
/// into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn finsler_matpoly_from_json(json: *const c_char, out: *mut *mut FinslerMatPoly) -> FinslerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let m: MatPoly = parse_json(read_str(json)?)?;
        *out = Box::into_raw(Box::new(FinslerMatPoly(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`finsler_matpoly_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn finsler_matpoly_free(m: *mut FinslerMatPoly) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix size and number of variables.
///
/// # Safety
/// `m` must be a live handle; `n` and `nvars` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn finsler_matpoly_shape(
    m: *const FinslerMatPoly,
    n: *mut usize,
    nvars: *mut usize,
) -> FinslerStatus {
    guard(|| {
        let m = &deref(m)?.0;
        if n.is_null() || nvars.is_null() {
            return Err(null());
        }
        *n = m.n();
        *nvars = m.nvars();
        Ok(())
    })
}

/// `{r : F - r G ≻ 0}` for constant `n×n` matrices given row-major.
///
/// # Safety
/// `fa` and `ga` must each hold `n * n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn finsler_interval_constant(
    n: usize,
    fa: *const f64,
    ga: *const f64,
    tol: f64,
    out: *mut FinslerInterval,
) -> FinslerStatus {
    guard(|| {
        if fa.is_null() || ga.is_null() || out.is_null() {
            return Err(null());
        }
        if n == 0 {
            return Err(Failure(FinslerStatus::Shape, "matrix size must be positive".into()));
        }
        let f = SymMatrix::from_row_major(n, std::slice::from_raw_parts(fa, n * n).to_vec());
        let g = SymMatrix::from_row_major(n, std::slice::from_raw_parts(ga, n * n).to_vec());
        let s = finsler_interval(&f, &g, tol).map_err(|e| Failure(FinslerStatus::Numeric, e.to_string()))?;
        *out = to_interval(&s.interval, s.low_confidence);
        Ok(())
    })
}

/// Section `{r : F(a) - r G(a) ≻ 0}` of two matrix polynomials at `point`.
///
/// # Safety
/// `f`, `g` must be live handles, `point` must hold `len` doubles and `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn finsler_section_at(
    f: *const FinslerMatPoly,
    g: *const FinslerMatPoly,
    point: *const f64,
    len: usize,
    tol: f64,
    out: *mut FinslerInterval,
) -> FinslerStatus {
    guard(|| {
        let (f, g) = (&deref(f)?.0, &deref(g)?.0);
        if out.is_null() || (point.is_null() && len > 0) {
            return Err(null());
        }
        if f.n() != g.n() || f.nvars() != g.nvars() {
            return Err(Failure(
                FinslerStatus::Shape,
                format!(
                    "F is {}x{} in {} variables, G is {}x{} in {}",
                    f.n(),
                    f.n(),
                    f.nvars(),
                    g.n(),
                    g.n(),
                    g.nvars()
                ),
            ));
        }
        let a = if len == 0 { &[][..] } else { std::slice::from_raw_parts(point, len) };
        let (fa, ga) = (f.eval(a)?, g.eval(a)?);
        let s = finsler_interval(&fa, &ga, tol).map_err(|e| Failure(FinslerStatus::Numeric, e.to_string()))?;
        *out = to_interval(&s.interval, s.low_confidence);
        Ok(())
    })
}

/// Parses a certificate (`{"kind": "wqm" | "og" | "ideal" | "chain", ..}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn finsler_certificate_from_json(
    json: *const c_char,
    out: *mut *mut FinslerCertificate,
) -> FinslerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let c: Certificate = parse_json(read_str(json)?)?;
        *out = Box::into_raw(Box::new(FinslerCertificate(c)));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from [`finsler_certificate_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn finsler_certificate_free(c: *mut FinslerCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Checks the certificate identity exactly. `f` may be null for chain
/// certificates, which carry their own target. On `Mismatch`, `mismatch`
/// (when non-null) receives the first failing entry.
///
/// # Safety
/// `cert` must be a live handle, `f` null or live, `gs` must hold `ngs`
/// live handles, and `mismatch` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn finsler_certificate_verify(
    cert: *const FinslerCertificate,
    f: *const FinslerMatPoly,
    gs: *const *const FinslerMatPoly,
    ngs: usize,
    mismatch: *mut FinslerMismatch,
) -> FinslerStatus {
    guard(|| {
        let cert = &deref(cert)?.0;
        let f = f.as_ref().map(|h| &h.0);
        if gs.is_null() && ngs > 0 {
            return Err(null());
        }
        let handles = if ngs == 0 { &[][..] } else { std::slice::from_raw_parts(gs, ngs) };
        let gs = handles
            .iter()
            .map(|&h| deref(h).map(|h| h.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let report = verify_certificate(cert, f, &gs)?;
        match report.verdict.mismatch() {
            None => Ok(()),
            Some(m) => {
                if !mismatch.is_null() {
                    *mismatch = FinslerMismatch { row: m.row, col: m.col };
                }
                Err(Failure(FinslerStatus::Mismatch, format!("{} certificate: {m}", report.kind)))
            }
        }
    })
}
