//! C ABI over the `diophant` library.
//!
//! Every entry point returns a [`DiophantStatus`]. Results come back through
//! out-parameters as opaque handles or as heap strings; handles are released
//! with their `_free` function and strings with [`diophant_string_free`].
//! After a failure, [`diophant_last_error`] describes it for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use diophant::contfrac::{expand, expand_rational, solve_pell, ContinuedFraction};
use diophant::logforms::{bound_lf4, bound_mordell, bound_thue_cubic, BoundRequest};
use diophant::numeric::{parse_expr, parse_rational, DEFAULT_CEILING};
use diophant::{classfield, cli, solvers, Error};
use num_bigint::BigInt;
use serde_json::json;

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiophantStatus {
    Ok = 0,
    InvalidParameters = 1,
    PrecisionExhausted = 2,
    NotApplicable = 3,
    Verification = 4,
    Parse = 5,
    Io = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    IndexOutOfRange = 9,
    /// Any other library error; see the message.
    Failed = 10,
    Panic = 11,
}

/// Opaque continued fraction expansion.
pub struct DiophantContinuedFraction {
    cf: ContinuedFraction,
}

/// Opaque JSON report of a bound, solver run or verification.
pub struct DiophantReport {
    json: serde_json::Value,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DiophantStatus {
    match e {
        Error::InvalidParameters(_) => DiophantStatus::InvalidParameters,
        Error::PrecisionExhausted { .. } => DiophantStatus::PrecisionExhausted,
        Error::NotApplicable(_) => DiophantStatus::NotApplicable,
        Error::Verification(_) => DiophantStatus::Verification,
        Error::Parse(_) => DiophantStatus::Parse,
        Error::Io(_) => DiophantStatus::Io,
        _ => DiophantStatus::Failed,
    }
}

enum Fail {
    Lib(Error),
    Status(DiophantStatus, &'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, recording any error or panic for [`diophant_last_error`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DiophantStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiophantStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            DiophantStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(DiophantStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(DiophantStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn int_arg(s: &str) -> Result<BigInt, Fail> {
    s.trim()
        .parse()
        .map_err(|_| Fail::Lib(Error::Parse(format!("{s:?} is not an integer"))))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail::Status(DiophantStatus::NullPointer, "null output pointer"))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

unsafe fn emit_report(out: *mut *mut DiophantReport, json: serde_json::Value) {
    *out = Box::into_raw(Box::new(DiophantReport { json }));
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn diophant_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn diophant_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diophant_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Expands a real expression such as `"355/113"` or `"sqrt(2)"` into at most
/// `count` partial quotients (rationals are expanded completely).
/// `ceiling_bits = 0` selects the default precision ceiling.
///
/// # Safety
/// `expr` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_cf_expand(
    expr: *const c_char,
    count: usize,
    ceiling_bits: u32,
    out: *mut *mut DiophantContinuedFraction,
) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        let x = parse_expr(str_arg(expr)?)?;
        let ceiling = if ceiling_bits == 0 {
            DEFAULT_CEILING
        } else {
            ceiling_bits
        };
        let cf = match x.as_rational() {
            Some(q) => expand_rational(q),
            None => expand(&x, count, ceiling)?,
        };
        *out = Box::into_raw(Box::new(DiophantContinuedFraction { cf }));
        Ok(())
    })
}

/// Number of partial quotients, 0 for null.
///
/// # Safety
/// `cf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diophant_cf_len(cf: *const DiophantContinuedFraction) -> usize {
    cf.as_ref().map_or(0, |h| h.cf.len())
}

/// Partial quotient `index` as a decimal string in `*out`.
///
/// # Safety
/// `cf` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_cf_quotient(
    cf: *const DiophantContinuedFraction,
    index: usize,
    out: *mut *mut c_char,
) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        let h = cf
            .as_ref()
            .ok_or(Fail::Status(DiophantStatus::NullPointer, "null handle"))?;
        let a = h.cf.quotients().get(index).ok_or(Fail::Status(
            DiophantStatus::IndexOutOfRange,
            "quotient index out of range",
        ))?;
        *out = to_c_string(a.to_string());
        Ok(())
    })
}

/// `{"quotients":[...],"convergents":[[p,q],...]}` with decimal strings, or null.
///
/// # Safety
/// `cf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diophant_cf_to_json(cf: *const DiophantContinuedFraction) -> *mut c_char {
    match cf.as_ref() {
        Some(h) => to_c_string(h.cf.to_json().to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `cf` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diophant_cf_free(cf: *mut DiophantContinuedFraction) {
    if !cf.is_null() {
        drop(Box::from_raw(cf));
    }
}

/// Fundamental solution of `x^2 - d y^2 = 1` for decimal `d`.
///
/// # Safety
/// `d` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_pell(d: *const c_char, out: *mut *mut DiophantReport) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        let s = solve_pell(&int_arg(str_arg(d)?)?)?;
        emit_report(
            out,
            json!({
                "d": s.d.to_string(),
                "x": s.x.to_string(),
                "y": s.y.to_string(),
                "period": s.period,
            }),
        );
        Ok(())
    })
}

/// Bound on `H` for `0 < |b1 log a1 + ... + bn log an| < exp(-delta H)` with
/// algebraic numbers of degree at most `d` and heights at most `height`.
/// `delta` is a rational string such as `"1/2"`, `height` a real expression.
///
/// # Safety
/// String arguments must be valid C strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_bound_lf4(
    n: u32,
    d: u32,
    delta: *const c_char,
    height: *const c_char,
    out: *mut *mut DiophantReport,
) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        let req = BoundRequest::new(n, d, parse_rational(str_arg(delta)?)?, parse_expr(str_arg(height)?)?);
        emit_report(out, bound_lf4(&req)?.to_json());
        Ok(())
    })
}

/// Bound for integral points on `y^2 = x^3 + k`.
///
/// # Safety
/// `k` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_bound_mordell(k: *const c_char, out: *mut *mut DiophantReport) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, bound_mordell(&int_arg(str_arg(k)?)?)?.to_json());
        Ok(())
    })
}

/// Bound for solutions of `x^3 - 2 y^3 = m`.
///
/// # Safety
/// `m` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_bound_thue_cubic(m: *const c_char, out: *mut *mut DiophantReport) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, bound_thue_cubic(&int_arg(str_arg(m)?)?)?.to_json());
        Ok(())
    })
}

/// All `r, s >= 0` with `a^r - b^s = m`.
///
/// # Safety
/// String arguments must be valid C strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_solve_exponential_gap(
    a: *const c_char,
    b: *const c_char,
    m: *const c_char,
    out: *mut *mut DiophantReport,
) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        let (a, b, m) = (int_arg(str_arg(a)?)?, int_arg(str_arg(b)?)?, int_arg(str_arg(m)?)?);
        emit_report(out, solvers::solve_exponential_gap(&a, &b, &m)?.to_json());
        Ok(())
    })
}

/// The full run for `N` with `N+1`, `3N+1`, `8N+1` all square.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_solve_quadruple(out: *mut *mut DiophantReport) -> DiophantStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, solvers::solve_quadruple()?.to_json());
        Ok(())
    })
}

/// Class number of `Q(sqrt(-d))` for squarefree `d >= 1`.
///
/// # Safety
/// `h` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diophant_class_number(d: u64, h: *mut u64) -> DiophantStatus {
    guard(|| {
        out_ptr(h)?;
        *h = classfield::class_number(d)?.h;
        Ok(())
    })
}

/// Replays a certificate file written by the command-line tool.
/// `ceiling_bits = 0` selects the default precision ceiling.
///
/// # Safety
/// `path` must be a valid C string; `out` may be null if the report is not wanted.
#[no_mangle]
pub unsafe extern "C" fn diophant_verify_certificate(
    path: *const c_char,
    ceiling_bits: u32,
    out: *mut *mut DiophantReport,
) -> DiophantStatus {
    guard(|| {
        let ceiling = if ceiling_bits == 0 {
            DEFAULT_CEILING
        } else {
            ceiling_bits
        };
        let v = cli::verify_file(Path::new(str_arg(path)?), ceiling)?;
        if !out.is_null() {
            emit_report(out, v);
        }
        Ok(())
    })
}

/// Report as compact JSON, or null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diophant_report_json(report: *const DiophantReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => to_c_string(r.json.to_string()),
        None => ptr::null_mut(),
    }
}

/// Top-level string or number field `key` of a report as a string, or null.
///
/// # Safety
/// `report` must be null or a live handle; `key` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn diophant_report_field(report: *const DiophantReport, key: *const c_char) -> *mut c_char {
    let (Some(r), Ok(k)) = (report.as_ref(), str_arg(key)) else {
        return ptr::null_mut();
    };
    match r.json.get(k) {
        Some(serde_json::Value::String(s)) => to_c_string(s.clone()),
        Some(v @ (serde_json::Value::Number(_) | serde_json::Value::Bool(_))) => to_c_string(v.to_string()),
        _ => ptr::null_mut(),
    }
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diophant_report_free(report: *mut DiophantReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
