//! C ABI over `pseudogram`.
//!
//! Arrangements live behind an opaque [`PsgArrangement`] handle. Every call
//! returns a [`PsgStatus`]; on failure the message is available from
//! [`psg_last_error_message`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`psg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pseudogram::cli_io::{chirotope_json, covectors_json, read_arrangement};
use pseudogram::straighten::{pipeline, PipelineOptions};
use pseudogram::{Arrangement, Error};

/// Opaque arrangement handle.
pub struct PsgArrangement(Arrangement);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsgStatus {
    Ok = 0,
    InvalidArrangement = 1,
    Degenerate = 2,
    InvalidArgument = 3,
    Internal = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PsgStatus {
    match err.exit_code() {
        1 => PsgStatus::InvalidArrangement,
        2 => PsgStatus::Degenerate,
        _ => PsgStatus::InvalidArgument,
    }
}

/// Runs `f`, recording the error message and mapping panics to `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (PsgStatus, String)>) -> PsgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PsgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error".into());
            PsgStatus::Internal
        }
    }
}

fn lib(err: Error) -> (PsgStatus, String) {
    (status_of(&err), err.to_string())
}

fn bad_arg(msg: &str) -> (PsgStatus, String) {
    (PsgStatus::InvalidArgument, msg.to_string())
}

unsafe fn arrangement<'a>(h: *const PsgArrangement) -> Result<&'a Arrangement, (PsgStatus, String)> {
    h.as_ref().map(|a| &a.0).ok_or_else(|| bad_arg("null arrangement handle"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (PsgStatus, String)> {
    if out.is_null() {
        return Err(bad_arg("null output pointer"));
    }
    let c = CString::new(s).map_err(|_| (PsgStatus::Internal, "output contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parses arrangement JSON into a new handle stored in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psg_arrangement_from_json(json: *const c_char, out: *mut *mut PsgArrangement) -> PsgStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(bad_arg("null argument"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| bad_arg("input is not UTF-8"))?;
        let a = read_arrangement(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(PsgArrangement(a)));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must come from [`psg_arrangement_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn psg_arrangement_free(h: *mut PsgArrangement) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psg_arrangement_len(h: *const PsgArrangement) -> usize {
    h.as_ref().map_or(0, |a| a.0.n())
}

/// Sets `*valid` to 1 when the arrangement is valid and 0 otherwise.
///
/// # Safety
/// `h` must be a live handle and `valid` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psg_validate(h: *const PsgArrangement, valid: *mut i32) -> PsgStatus {
    guard(|| {
        let a = arrangement(h)?;
        if valid.is_null() {
            return Err(bad_arg("null output pointer"));
        }
        *valid = i32::from(a.validate().map_err(lib)?.valid);
        Ok(())
    })
}

/// Covectors as a JSON array of sign strings.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psg_covectors_json(h: *const PsgArrangement, out: *mut *mut c_char) -> PsgStatus {
    guard(|| {
        let x = arrangement(h)?.covectors().map_err(lib)?;
        put_string(out, covectors_json(&x).to_string())
    })
}

/// Chirotope as a JSON array of `[i, j, k, sign]`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psg_chirotope_json(h: *const PsgArrangement, out: *mut *mut c_char) -> PsgStatus {
    guard(|| {
        let chi = arrangement(h)?.chirotope().map_err(lib)?;
        put_string(out, chirotope_json(&chi).to_string())
    })
}

/// Straightens with `frames` trace frames. The Parseval frame JSON goes to
/// `*frame_out`; when `trace_out` is not null the trace JSON goes there.
///
/// # Safety
/// `h` must be a live handle; `frame_out` a valid pointer; `trace_out` null
/// or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psg_straighten(
    h: *const PsgArrangement,
    frames: usize,
    frame_out: *mut *mut c_char,
    trace_out: *mut *mut c_char,
) -> PsgStatus {
    guard(|| {
        let a = arrangement(h)?;
        if frame_out.is_null() {
            return Err(bad_arg("null output pointer"));
        }
        let (f, trace) = pipeline(a, &PipelineOptions { frames, ..PipelineOptions::default() }).map_err(lib)?;
        let to_json = |v: serde_json::Result<String>| v.map_err(|e| (PsgStatus::Internal, e.to_string()));
        put_string(frame_out, to_json(serde_json::to_string(&f))?)?;
        if !trace_out.is_null() {
            put_string(trace_out, to_json(serde_json::to_string(&trace))?)?;
        }
        Ok(())
    })
}

/// Weighted Fréchet distance between two arrangements of equal size.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psg_weighted_distance(
    a: *const PsgArrangement,
    b: *const PsgArrangement,
    out: *mut f64,
) -> PsgStatus {
    guard(|| {
        let (a, b) = (arrangement(a)?, arrangement(b)?);
        if out.is_null() {
            return Err(bad_arg("null output pointer"));
        }
        *out = pseudogram::arrangement::arrangement_dist(a, b).map_err(lib)?;
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn psg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn psg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
