//! C ABI over `msrlab`.
//!
//! Codes are opaque `MsrCode` handles created by [`msr_code_parse`] and
//! released with [`msr_code_free`]. Every fallible call returns an
//! [`MsrStatus`]; on failure [`msr_last_error`] describes what went wrong on
//! the calling thread. Field elements cross the boundary as `uint32_t`
//! canonical values. Node numbers are 1-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use msrlab::bounds::{evaluate_bounds, LambdaEstimate};
use msrlab::format::{write_code_file, CodeFile};
use msrlab::repair::{verify_scheme, RepairPlan};
use msrlab::{Code, Error, FieldElement, RepairScheme};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsrStatus {
    Ok = 0,
    /// The code or scheme fails a checked property.
    Violation = 1,
    /// Malformed text, bad arguments or out-of-range values.
    InvalidInput = 2,
    /// An internal consistency check failed.
    Internal = 3,
    NullPointer = 4,
    /// The output buffer is too small.
    BufferTooSmall = 5,
}

/// Opaque code handle, optionally carrying a repair scheme.
pub struct MsrCode {
    code: Code,
    scheme: Option<RepairScheme>,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MsrParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub l: usize,
    /// Field characteristic.
    pub p: u32,
    /// Extension degree.
    pub m: u32,
    pub has_scheme: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MsrVerifyResult {
    pub mds_ok: bool,
    pub blocks_checked: usize,
    /// False when the handle has no scheme.
    pub has_scheme: bool,
    pub repair_ok: bool,
    pub violations: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MsrBounds {
    pub t: u64,
    pub lambda: u64,
    pub lambda_exact: bool,
    pub quadratic_floor: u64,
    pub rlog_real: f64,
    pub rlog_floor: u64,
    pub prior_log_real: f64,
    pub prior_log_floor: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: MsrStatus, msg: impl Into<String>) -> MsrStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> MsrStatus {
    let status = match e {
        Error::SingularStack | Error::SchemeInvalid(_) => MsrStatus::Violation,
        _ => MsrStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> MsrStatus) -> MsrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(MsrStatus::Internal, "panic inside msrlab"),
    }
}

unsafe fn elements(code: &Code, data: *const u32, len: usize) -> Result<Vec<Vec<FieldElement>>, MsrStatus> {
    let p = code.params();
    if data.is_null() {
        return Err(fail(MsrStatus::NullPointer, "data is null"));
    }
    if len != p.k * p.l {
        return Err(fail(MsrStatus::InvalidInput, format!("data must hold k*l = {} values", p.k * p.l)));
    }
    let raw = std::slice::from_raw_parts(data, len);
    let f = code.field();
    let mut out = Vec::with_capacity(p.k);
    for chunk in raw.chunks(p.l) {
        let row =
            chunk.iter().map(|&v| f.elem(u64::from(v))).collect::<Result<Vec<_>, _>>().map_err(from_error)?;
        out.push(row);
    }
    Ok(out)
}

/// Last error message on this thread, or null. Valid until the next call
/// into the library from the same thread.
#[no_mangle]
pub extern "C" fn msr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse `msrcode v1` text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msr_code_parse(text: *const c_char, out: *mut *mut MsrCode) -> MsrStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(MsrStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(MsrStatus::InvalidInput, "text is not UTF-8");
        };
        let file = match CodeFile::parse(text) {
            Ok(f) => f,
            Err(e) => return from_error(e),
        };
        if let Some((u, j)) = file.singular_matrix() {
            return fail(MsrStatus::Violation, format!("C u={} j={} is singular", u + 1, j + 1));
        }
        match file.into_code() {
            Ok((code, scheme)) => {
                *out = Box::into_raw(Box::new(MsrCode { code, scheme }));
                MsrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `code` must come from [`msr_code_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn msr_code_free(code: *mut MsrCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// # Safety
/// `code` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn msr_code_params(code: *const MsrCode, out: *mut MsrParams) -> MsrStatus {
    guarded(|| {
        let (Some(h), Some(out)) = (code.as_ref(), out.as_mut()) else {
            return fail(MsrStatus::NullPointer, "null argument");
        };
        let p = h.code.params();
        *out = MsrParams {
            n: p.n,
            k: p.k,
            r: p.r,
            l: p.l,
            p: p.field.characteristic(),
            m: p.field.degree(),
            has_scheme: h.scheme.is_some(),
        };
        MsrStatus::Ok
    })
}

/// MDS check plus scheme verification. Returns `Violation` when either
/// fails; `*out` is filled in both cases.
///
/// # Safety
/// `code` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn msr_code_verify(code: *const MsrCode, out: *mut MsrVerifyResult) -> MsrStatus {
    guarded(|| {
        let (Some(h), Some(out)) = (code.as_ref(), out.as_mut()) else {
            return fail(MsrStatus::NullPointer, "null argument");
        };
        let mds = h.code.mds_check();
        let mut res = MsrVerifyResult {
            mds_ok: mds.ok,
            blocks_checked: mds.blocks_checked,
            has_scheme: h.scheme.is_some(),
            repair_ok: true,
            violations: 0,
        };
        if let Some(s) = &h.scheme {
            match verify_scheme(&h.code, s) {
                Ok(r) => {
                    res.repair_ok = r.ok;
                    res.violations = r.violations.len();
                }
                Err(e) => {
                    *out = MsrVerifyResult { repair_ok: false, ..res };
                    return from_error(e);
                }
            }
        }
        *out = res;
        if res.mds_ok && res.repair_ok {
            MsrStatus::Ok
        } else {
            fail(MsrStatus::Violation, "code or scheme fails verification")
        }
    })
}

/// Encode `k*l` data values (node-major) into `r*l` parity values.
///
/// # Safety
/// `data` must hold `data_len` values and `out` room for `out_len`.
#[no_mangle]
pub unsafe extern "C" fn msr_code_encode(
    code: *const MsrCode,
    data: *const u32,
    data_len: usize,
    out: *mut u32,
    out_len: usize,
) -> MsrStatus {
    guarded(|| {
        let Some(h) = code.as_ref() else {
            return fail(MsrStatus::NullPointer, "null code");
        };
        if out.is_null() {
            return fail(MsrStatus::NullPointer, "null output");
        }
        let p = h.code.params();
        if out_len < p.r * p.l {
            return fail(MsrStatus::BufferTooSmall, format!("need {} output slots", p.r * p.l));
        }
        let data = match elements(&h.code, data, data_len) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match h.code.encode(&data) {
            Ok(parities) => {
                let dst = std::slice::from_raw_parts_mut(out, p.r * p.l);
                for (d, x) in dst.iter_mut().zip(parities.iter().flatten()) {
                    *d = x.value();
                }
                MsrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Encode `data`, erase systematic node `node`, rebuild it from helper
/// downloads and write its `l` values to `out`. `*downloaded` receives the
/// number of symbols transferred.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `downloaded` may be null.
#[no_mangle]
pub unsafe extern "C" fn msr_code_repair(
    code: *const MsrCode,
    node: usize,
    data: *const u32,
    data_len: usize,
    out: *mut u32,
    out_len: usize,
    downloaded: *mut usize,
) -> MsrStatus {
    guarded(|| {
        let Some(h) = code.as_ref() else {
            return fail(MsrStatus::NullPointer, "null code");
        };
        if out.is_null() {
            return fail(MsrStatus::NullPointer, "null output");
        }
        let Some(scheme) = &h.scheme else {
            return fail(MsrStatus::InvalidInput, "the code has no repair scheme");
        };
        let p = h.code.params();
        if node == 0 || node > p.k {
            return fail(MsrStatus::InvalidInput, format!("node must be in [1, {}]", p.k));
        }
        if out_len < p.l {
            return fail(MsrStatus::BufferTooSmall, format!("need {} output slots", p.l));
        }
        let data = match elements(&h.code, data, data_len) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let plan = match RepairPlan::new(&h.code, scheme, node - 1) {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        let contents = match h.code.node_contents(&data) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        let mut erased = contents.clone();
        erased[node - 1] = vec![FieldElement::ZERO; p.l];
        match plan.execute(&erased) {
            Ok(outcome) => {
                let dst = std::slice::from_raw_parts_mut(out, p.l);
                for (d, x) in dst.iter_mut().zip(&outcome.reconstructed) {
                    *d = x.value();
                }
                if let Some(dl) = downloaded.as_mut() {
                    *dl = outcome.downloaded_symbols;
                }
                if outcome.reconstructed != contents[node - 1] {
                    return fail(MsrStatus::Internal, "repair did not reproduce the erased node");
                }
                MsrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Canonical text of the handle; free with [`msr_string_free`].
///
/// # Safety
/// `code` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn msr_code_to_string(code: *const MsrCode, out: *mut *mut c_char) -> MsrStatus {
    guarded(|| {
        let (Some(h), false) = (code.as_ref(), out.is_null()) else {
            return fail(MsrStatus::NullPointer, "null argument");
        };
        let text = write_code_file(&h.code, h.scheme.as_ref());
        match CString::new(text) {
            Ok(s) => {
                *out = s.into_raw();
                MsrStatus::Ok
            }
            Err(_) => fail(MsrStatus::Internal, "text contains NUL"),
        }
    })
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn msr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Systematic-length bounds for sub-packetization `l` and `r` parities.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msr_bounds_evaluate(l: u64, r: u64, out: *mut MsrBounds) -> MsrStatus {
    guarded(|| {
        let Some(out) = out.as_mut() else {
            return fail(MsrStatus::NullPointer, "null output");
        };
        match evaluate_bounds(l, r) {
            Ok(b) => {
                *out = MsrBounds {
                    t: b.t,
                    lambda: b.lambda.value(),
                    lambda_exact: matches!(b.lambda, LambdaEstimate::Exact(_)),
                    quadratic_floor: b.quadratic_floor,
                    rlog_real: b.rlog_real,
                    rlog_floor: b.rlog_floor,
                    prior_log_real: b.prior_goparaju_log_real,
                    prior_log_floor: b.prior_goparaju_log_floor,
                };
                MsrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
