//! C interface to `dfatoms`.
//!
//! A run is driven by a configuration document (the same JSON the CLI reads)
//! and returns an opaque report handle. Every function returns one of the
//! `DF_*` status codes; after a failure `df_last_error_message` describes it.
//! Strings returned by the library stay owned by it.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dfatoms::io::{oracle_sommerfeld_shifted, run_document, to_json_string, Mode};

/// Success (converged run).
pub const DF_OK: c_int = 0;
/// I/O failure.
pub const DF_IO_ERROR: c_int = 1;
/// The solver ran but did not converge; the report is still available.
pub const DF_NOT_CONVERGED: c_int = 2;
/// The configuration document was rejected.
pub const DF_INVALID_CONFIG: c_int = 3;
/// Solver, domain or numerical failure.
pub const DF_SOLVER_ERROR: c_int = 4;
/// A required pointer argument was null.
pub const DF_NULL_POINTER: c_int = 5;
/// A string argument was not valid UTF-8.
pub const DF_INVALID_UTF8: c_int = 6;
/// The requested report entry does not exist or is not a number.
pub const DF_NOT_FOUND: c_int = 7;
/// A panic was caught at the boundary.
pub const DF_INTERNAL_ERROR: c_int = 8;

/// Opaque run report.
pub struct DfReport {
    report: serde_json::Value,
    json: CString,
    status: c_int,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
}

fn guard(f: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal error: panic caught at the C boundary");
            DF_INTERNAL_ERROR
        }
    }
}

/// # Safety
/// `s` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, c_int> {
    if s.is_null() {
        set_error(format!("{what} is null"));
        return Err(DF_NULL_POINTER);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        DF_INVALID_UTF8
    })
}

/// Runs a configuration document. `mode` may be null to use the document's
/// own `mode`. On return `*out` holds a report handle whenever a report was
/// produced (also for non-converged and rejected runs); release it with
/// `df_report_free`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string, `mode` null or a
/// NUL-terminated string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn df_run(config_json: *const c_char, mode: *const c_char, out: *mut *mut DfReport) -> c_int {
    guard(|| {
        clear_error();
        if out.is_null() {
            set_error("out is null");
            return DF_NULL_POINTER;
        }
        *out = ptr::null_mut();
        let doc = match read_str(config_json, "config_json") {
            Ok(s) => s,
            Err(c) => return c,
        };
        let mode = if mode.is_null() {
            None
        } else {
            match read_str(mode, "mode").map(|m| m.parse::<Mode>()) {
                Ok(Ok(m)) => Some(m),
                Ok(Err(e)) => {
                    set_error(e.to_string());
                    return DF_INVALID_CONFIG;
                }
                Err(c) => return c,
            }
        };
        let result = run_document(doc, mode);
        let status = result.exit_code;
        if let Some(msg) = result.report.pointer("/error/message").and_then(|m| m.as_str()) {
            set_error(msg);
        }
        let json = CString::new(to_json_string(&result.report)).expect("JSON has no interior NUL");
        *out = Box::into_raw(Box::new(DfReport {
            report: result.report,
            json,
            status,
        }));
        status
    })
}

/// Status of the run the report describes (one of the `DF_*` codes).
///
/// # Safety
/// `report` must be null or a handle from `df_run`.
#[no_mangle]
pub unsafe extern "C" fn df_report_status(report: *const DfReport) -> c_int {
    match report.as_ref() {
        Some(r) => r.status,
        None => DF_NULL_POINTER,
    }
}

/// The report document as JSON, valid until the handle is freed. Null for a
/// null handle.
///
/// # Safety
/// `report` must be null or a handle from `df_run`.
#[no_mangle]
pub unsafe extern "C" fn df_report_json(report: *const DfReport) -> *const c_char {
    match report.as_ref() {
        Some(r) => r.json.as_ptr(),
        None => ptr::null(),
    }
}

/// Reads a number from the report by JSON pointer, for example
/// `/results/energy/shifted`.
///
/// # Safety
/// `report` must be a handle from `df_run`, `pointer` a NUL-terminated
/// string and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn df_report_number(report: *const DfReport, pointer: *const c_char, value: *mut c_double) -> c_int {
    guard(|| {
        clear_error();
        let Some(r) = report.as_ref() else {
            set_error("report is null");
            return DF_NULL_POINTER;
        };
        if value.is_null() {
            set_error("value is null");
            return DF_NULL_POINTER;
        }
        let p = match read_str(pointer, "pointer") {
            Ok(s) => s,
            Err(c) => return c,
        };
        match r.report.pointer(p).and_then(|v| v.as_f64()) {
            Some(x) => {
                *value = x;
                DF_OK
            }
            None => {
                set_error(format!("no number at {p}"));
                DF_NOT_FOUND
            }
        }
    })
}

/// Releases a report handle. Null is accepted.
///
/// # Safety
/// `report` must be null or a handle from `df_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_report_free(report: *mut DfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Closed-form Dirac-Coulomb level `E - c²` for charge `z`, channel `kappa`
/// and principal number `n`.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn df_oracle_sommerfeld(z: c_double, kappa: c_int, n: c_int, c: c_double, value: *mut c_double) -> c_int {
    guard(|| {
        clear_error();
        if value.is_null() {
            set_error("value is null");
            return DF_NULL_POINTER;
        }
        if n < 1 {
            set_error(format!("n must be positive, got {n}"));
            return DF_SOLVER_ERROR;
        }
        match oracle_sommerfeld_shifted(z, kappa, n as u32, c) {
            Ok(e) => {
                *value = e;
                DF_OK
            }
            Err(e) => {
                set_error(e.to_string());
                DF_SOLVER_ERROR
            }
        }
    })
}

/// Message describing the last failure on this thread; empty if the last
/// call succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn df_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version string.
#[no_mangle]
pub extern "C" fn df_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}
