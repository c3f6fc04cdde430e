//! C ABI over the `caialg` library.
//!
//! Every function returns a [`CaialgStatus`]; results are written through
//! out-pointers. Objects are exposed as opaque handles that must be released
//! with the matching `*_free` function. Strings returned to the caller are
//! owned by the caller and released with [`caialg_string_free`]. After a
//! non-OK status, [`caialg_last_error`] describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use caialg::cai::{self, CRule, CaiError, CaiParams, Element};
use caialg::cli::{self, ConfigError, RunConfig};
use caialg::linalg::{self, ComplexMatrix, LinalgError};
use caialg::report::{self, Format, Status, VerificationReport};
use num_complex::Complex64;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaialgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Range = 5,
    OutOfBounds = 6,
    Panic = 7,
}

/// Validated algebra parameters (weight rule and truncation).
pub struct CaialgParams(CaiParams);

/// Reports produced by a suite run, with its exit code.
pub struct CaialgReportSet {
    reports: Vec<VerificationReport>,
    exit_code: i32,
}

/// Plain-data view of one report; strings are fetched separately.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CaialgReportView {
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    /// 0 pass, 1 fail, 2 inconclusive.
    pub status: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(CaialgStatus, String);

impl From<LinalgError> for Failure {
    fn from(e: LinalgError) -> Self {
        let code = match e {
            LinalgError::DimMismatch { .. } | LinalgError::DimensionCap(_) | LinalgError::NonFinite => CaialgStatus::InvalidArgument,
            LinalgError::NoConvergence | LinalgError::Singular { .. } => CaialgStatus::Numerical,
        };
        Failure(code, e.to_string())
    }
}

impl From<CaiError> for Failure {
    fn from(e: CaiError) -> Self {
        let code = match &e {
            CaiError::Linalg(inner) => return Failure::from(inner.clone()),
            CaiError::RangeExceeded(_) | CaiError::LevelOutOfRange { .. } => CaialgStatus::Range,
            CaiError::InvariantViolation(_) => CaialgStatus::Numerical,
            _ => CaialgStatus::InvalidArgument,
        };
        Failure(code, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(CaialgStatus::Config, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CaialgStatus::InvalidArgument, msg.into())
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CaialgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            CaialgStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            CaialgStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(CaialgStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(s, name)?;
    CStr::from_ptr(s).to_str().map_err(|_| invalid(format!("{name} is not valid UTF-8")))
}

/// Builds an `n x n` matrix from row-major real and (optional) imaginary parts.
unsafe fn read_matrix(re: *const f64, im: *const f64, n: usize) -> Result<ComplexMatrix, Failure> {
    non_null(re, "re")?;
    let len = n.checked_mul(n).ok_or_else(|| invalid("dimension overflow"))?;
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
    Ok(ComplexMatrix::from_fn(n, |i, j| Complex64::new(re[i * n + j], im.map_or(0.0, |v| v[i * n + j])))?)
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| invalid("string contains a nul byte"))
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn caialg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn caialg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn caialg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parameters with the linear rule `c_n = n + offset`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn caialg_params_new_linear(offset: f64, n_max: usize, out: *mut *mut CaialgParams) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = CaiParams::new(CRule::Linear { offset }, n_max)?;
        *out = Box::into_raw(Box::new(CaialgParams(p)));
        Ok(())
    })
}

/// Parameters from an explicit table `c_1..c_len`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_params_new_table(values: *const f64, len: usize, n_max: usize, out: *mut *mut CaialgParams) -> CaialgStatus {
    guard(|| {
        non_null(values, "values")?;
        non_null(out, "out")?;
        let values = std::slice::from_raw_parts(values, len).to_vec();
        let p = CaiParams::new(CRule::Table { values }, n_max)?;
        *out = Box::into_raw(Box::new(CaialgParams(p)));
        Ok(())
    })
}

/// Weight `c_n` of level `n`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_params_c(params: *const CaialgParams, n: usize, out: *mut f64) -> CaialgStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let p = &(*params).0;
        p.check_level(n)?;
        *out = p.c(n);
        Ok(())
    })
}

/// # Safety
/// `params` must come from a constructor in this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn caialg_params_free(params: *mut CaialgParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Operator 2-norm of an `n x n` row-major matrix; `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `n*n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn caialg_op_norm(re: *const f64, im: *const f64, n: usize, out: *mut f64) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = linalg::op_norm(&read_matrix(re, im, n)?)?;
        Ok(())
    })
}

/// Spectral radius of an `n x n` row-major matrix; `im` may be null.
///
/// # Safety
/// As for [`caialg_op_norm`].
#[no_mangle]
pub unsafe extern "C" fn caialg_spectral_radius(re: *const f64, im: *const f64, n: usize, out: *mut f64) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = linalg::spectral_radius(&read_matrix(re, im, n)?)?;
        Ok(())
    })
}

/// Writes the real `n x n` block `u_{n,k}` row-major into `out` and the
/// number of averaged exponents into `mu`.
///
/// # Safety
/// `out` must have room for `out_len >= n*n` doubles; `mu` may be null.
#[no_mangle]
pub unsafe extern "C" fn caialg_cai_block(n: usize, k: usize, out: *mut f64, out_len: usize, mu: *mut usize) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        if out_len < n.saturating_mul(n) {
            return Err(Failure(CaialgStatus::OutOfBounds, format!("buffer of {out_len} doubles cannot hold {n}x{n}")));
        }
        let b = cai::cai_block(n, k)?;
        let buf = std::slice::from_raw_parts_mut(out, n * n);
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = b.u.get(i, j).re;
            }
        }
        if !mu.is_null() {
            *mu = b.mu;
        }
        Ok(())
    })
}

/// Truncated `sup_{lo<=n<=hi} p_n(a_n)` for an element given as JSON.
///
/// # Safety
/// `params` must be live, `element_json` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_p_norm(
    params: *const CaialgParams,
    element_json: *const c_char,
    lo: usize,
    hi: usize,
    out: *mut f64,
) -> CaialgStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let text = read_str(element_json, "element_json")?;
        let el: Element = serde_json::from_str(text).map_err(|e| invalid(format!("element: {e}")))?;
        *out = cai::p_norm(&el, lo..=hi, &(*params).0)?.sup;
        Ok(())
    })
}

/// Runs the suites described by a JSON run configuration (`"{}"` for the
/// defaults). Verification failures are not errors: inspect the exit code
/// and the reports.
///
/// # Safety
/// `config_json` must be nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_run_suite(config_json: *const c_char, out: *mut *mut CaialgReportSet) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        let cfg = RunConfig::from_json(read_str(config_json, "config_json")?)?;
        let outcome = cli::run_suite(&cfg)?;
        *out = Box::into_raw(Box::new(CaialgReportSet { reports: outcome.reports, exit_code: outcome.exit_code }));
        Ok(())
    })
}

/// # Safety
/// `set` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_report_set_len(set: *const CaialgReportSet, out: *mut usize) -> CaialgStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        *out = (&*set).reports.len();
        Ok(())
    })
}

/// 0 if every report passed, 1 otherwise.
///
/// # Safety
/// `set` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_report_set_exit_code(set: *const CaialgReportSet, out: *mut i32) -> CaialgStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        *out = (*set).exit_code;
        Ok(())
    })
}

unsafe fn report_at<'a>(set: *const CaialgReportSet, index: usize) -> Result<&'a VerificationReport, Failure> {
    non_null(set, "set")?;
    let set = &*set;
    set.reports
        .get(index)
        .ok_or_else(|| Failure(CaialgStatus::OutOfBounds, format!("report index {index} out of range")))
}

/// # Safety
/// `set` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_report_get(set: *const CaialgReportSet, index: usize, out: *mut CaialgReportView) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = report_at(set, index)?;
        *out = CaialgReportView {
            measured: r.measured,
            bound: r.bound,
            margin: r.margin,
            pass: r.pass,
            status: match r.status {
                Status::Pass => 0,
                Status::Fail => 1,
                Status::Inconclusive => 2,
            },
        };
        Ok(())
    })
}

/// Identifier of report `index`; free with [`caialg_string_free`].
///
/// # Safety
/// `set` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_report_lemma_id(set: *const CaialgReportSet, index: usize, out: *mut *mut c_char) -> CaialgStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = into_c_string(report_at(set, index)?.lemma_id.clone())?;
        Ok(())
    })
}

/// Serializes the set; `format` is 0 for JSON and 1 for CSV. Free the
/// result with [`caialg_string_free`].
///
/// # Safety
/// `set` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn caialg_report_set_render(set: *const CaialgReportSet, format: i32, out: *mut *mut c_char) -> CaialgStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        let fmt = match format {
            0 => Format::Json,
            1 => Format::Csv,
            other => return Err(invalid(format!("unknown format code {other}"))),
        };
        let text = report::render(&(&*set).reports, fmt).map_err(|e| invalid(e.to_string()))?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// # Safety
/// `set` must come from [`caialg_run_suite`], or be null.
#[no_mangle]
pub unsafe extern "C" fn caialg_report_set_free(set: *mut CaialgReportSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}
