//! C ABI over the geoap library.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns a
//! [`GeoapStatus`]; the message of the last failure on the calling thread is
//! available from [`geoap_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use geoap::algebra::Mat;
use geoap::ap::{build_ap_witness, verify_witness, ApWitness};
use geoap::geodesics::{bits_for_digits, format_sig, trace_to_length_prec, OUTPUT_DIGITS};
use geoap::orders::{order_p, DEFAULT_BUDGET};
use geoap::ramsey::{vdw_number, VdwOutcome};
use geoap::Error;
use rug::Integer;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeoapStatus {
    Ok = 0,
    InvalidArgument = 2,
    Domain = 3,
    Certificate = 4,
    NullPointer = 5,
    Utf8 = 6,
    Panic = 7,
}

/// An integer matrix of determinant 1 (2×2 or 3×3).
pub struct GeoapMatrix(Mat);

/// A progression witness.
pub struct GeoapWitness(ApWitness);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GeoapStatus {
    match e.exit_code() {
        2 => GeoapStatus::InvalidArgument,
        4 => GeoapStatus::Certificate,
        _ => GeoapStatus::Domain,
    }
}

fn guard<F: FnOnce() -> Result<(), GeoapStatus>>(f: F) -> GeoapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GeoapStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            GeoapStatus::Panic
        }
    }
}

fn fail(e: Error) -> GeoapStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, GeoapStatus> {
    if s.is_null() {
        set_error("null string".into());
        return Err(GeoapStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not UTF-8".into());
        GeoapStatus::Utf8
    })
}

fn check_out<T>(out: *mut T) -> Result<(), GeoapStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(GeoapStatus::NullPointer);
    }
    Ok(())
}

unsafe fn deref<'a, T>(h: *const T) -> Result<&'a T, GeoapStatus> {
    h.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        GeoapStatus::NullPointer
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn geoap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn geoap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses comma-separated row-major entries such as `"2,1,1,1"`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_matrix_parse(text: *const c_char, out: *mut *mut GeoapMatrix) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        let m = Mat::parse(read_str(text)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(GeoapMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`geoap_matrix_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn geoap_matrix_free(m: *mut GeoapMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Trace as a decimal string.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_matrix_trace(m: *const GeoapMatrix, out: *mut *mut c_char) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        *out = into_c_string(deref(m)?.0.trace().to_string());
        Ok(())
    })
}

/// Least `j ≥ 1` with `modulus | b_j`.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_order_p(m: *const GeoapMatrix, modulus: u64, out: *mut u64) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        *out = order_p(&deref(m)?.0, modulus).map_err(fail)?;
        Ok(())
    })
}

/// `2·arccosh(trace/2)` printed with `digits` significant digits (at least 25).
///
/// # Safety
/// `trace` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_trace_to_length(trace: *const c_char, digits: u32, out: *mut *mut c_char) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        let digits = (digits as usize).max(OUTPUT_DIGITS);
        let text = read_str(trace)?;
        let t: Integer = text
            .trim()
            .parse()
            .map_err(|_| fail(Error::InvalidArgument(format!("bad integer {text:?}"))))?;
        let len = trace_to_length_prec(&t, bits_for_digits(digits)).map_err(fail)?;
        *out = into_c_string(format_sig(&len, digits));
        Ok(())
    })
}

/// Builds a `k`-term witness for an absolutely primitive element.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_witness_build(m: *const GeoapMatrix, k: u64, out: *mut *mut GeoapWitness) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        let w = build_ap_witness(&deref(m)?.0, k, DEFAULT_BUDGET).map_err(fail)?;
        *out = Box::into_raw(Box::new(GeoapWitness(w)));
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_witness_from_json(json: *const c_char, out: *mut *mut GeoapWitness) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        let w = ApWitness::from_json(read_str(json)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(GeoapWitness(w)));
        Ok(())
    })
}

/// # Safety
/// `w` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_witness_to_json(w: *const GeoapWitness, out: *mut *mut c_char) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        *out = into_c_string(deref(w)?.0.to_json().map_err(fail)?);
        Ok(())
    })
}

/// Re-checks every claim of the witness. Returns `GEOAP_STATUS_CERTIFICATE`
/// with the reasons in [`geoap_last_error`] when verification fails.
///
/// # Safety
/// `w` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn geoap_witness_verify(w: *const GeoapWitness) -> GeoapStatus {
    guard(|| {
        let v = verify_witness(&deref(w)?.0);
        if v.ok {
            Ok(())
        } else {
            set_error(v.reasons.join("; "));
            Err(GeoapStatus::Certificate)
        }
    })
}

/// # Safety
/// `w` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn geoap_witness_free(w: *mut GeoapWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Exhaustive `W(colors, k)`; `GEOAP_STATUS_DOMAIN` when it exceeds `n_max`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoap_vdw_number(colors: u32, k: u32, n_max: u64, out: *mut u64) -> GeoapStatus {
    guard(|| {
        check_out(out)?;
        match vdw_number(colors, k as usize, n_max, None).map_err(fail)? {
            VdwOutcome::Exact { n, .. } => {
                *out = n;
                Ok(())
            }
            VdwOutcome::Unknown { reason, .. } => {
                set_error(reason);
                Err(GeoapStatus::Domain)
            }
        }
    })
}
