//! C ABI for the fano14 verification toolkit.
//!
//! Reports are opaque handles owned by the caller and released with
//! [`fano14_report_free`]. Strings returned by this library are released with
//! [`fano14_string_free`]. On any non-`FANO14_OK` status a description is
//! available from [`fano14_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fano14::data::DataSource;
use fano14::scenarios::{run_all, BatchReport, RunOptions};

/// Status codes returned by every fallible call.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fano14Status {
    FANO14_OK = 0,
    FANO14_NULL_POINTER = 1,
    FANO14_INVALID_UTF8 = 2,
    FANO14_INVALID_ARGUMENT = 3,
    FANO14_DATA_ERROR = 4,
    FANO14_INTERNAL_ERROR = 5,
}

use Fano14Status::*;

/// Run configuration. `samples = 0` skips the sampling oracle.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct Fano14Options {
    pub samples: usize,
    pub seed: u64,
    pub parallel: bool,
}

/// Opaque batch report.
pub struct Fano14Report {
    inner: BatchReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(status: Fano14Status, msg: impl Into<String>) -> Fano14Status {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &fano14::Error) -> Fano14Status {
    match e {
        fano14::Error::InvalidArgument(_) => FANO14_INVALID_ARGUMENT,
        _ => FANO14_DATA_ERROR,
    }
}

unsafe fn opt_str<'a>(p: *const libc::c_char) -> Result<Option<&'a str>, Fano14Status> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| set_error(FANO14_INVALID_UTF8, "argument is not valid UTF-8"))
}

fn guarded(f: impl FnOnce() -> Fano14Status) -> Fano14Status {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| set_error(FANO14_INTERNAL_ERROR, "panic inside fano14"))
}

fn into_c_string(s: String) -> *mut libc::c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Default options: 100 samples, seed 0, serial.
#[no_mangle]
pub extern "C" fn fano14_options_default() -> Fano14Options {
    Fano14Options { samples: 100, seed: 0, parallel: false }
}

/// Run the verification batch and store a new report in `*out`.
///
/// `scenario` selects a single scenario, or all of them (with the atlas and the
/// coverage checklist) when NULL. `data_dir` overrides the built-in data when
/// non-NULL. `options` may be NULL for the defaults.
///
/// # Safety
/// `scenario` and `data_dir` must be NULL or NUL-terminated strings, `options`
/// NULL or a valid pointer, and `out` a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fano14_verify(
    options: *const Fano14Options,
    scenario: *const libc::c_char,
    data_dir: *const libc::c_char,
    out: *mut *mut Fano14Report,
) -> Fano14Status {
    guarded(|| {
        if out.is_null() {
            return set_error(FANO14_NULL_POINTER, "out is NULL");
        }
        *out = ptr::null_mut();
        let opts = if options.is_null() { fano14_options_default() } else { *options };
        let scenario = match opt_str(scenario) {
            Ok(s) => s.map(str::to_string),
            Err(status) => return status,
        };
        let src = match opt_str(data_dir) {
            Ok(Some(dir)) => DataSource::dir(dir),
            Ok(None) => DataSource::embedded(),
            Err(status) => return status,
        };
        let run = RunOptions {
            parallel: opts.parallel,
            samples: opts.samples,
            seed: opts.seed,
            include_atlas: scenario.is_none(),
            scenario,
        };
        match run_all(&src, &run) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(Fano14Report { inner: report }));
                FANO14_OK
            }
            Err(e) => set_error(status_of(&e), e.to_string()),
        }
    })
}

/// 1 if every check in the report passed, 0 if not, -1 for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle from [`fano14_verify`].
#[no_mangle]
pub unsafe extern "C" fn fano14_report_verdict(report: *const Fano14Report) -> i32 {
    match report.as_ref() {
        Some(r) => i32::from(r.inner.verdict),
        None => -1,
    }
}

/// Number of scenario reports in the batch, or 0 for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle from [`fano14_verify`].
#[no_mangle]
pub unsafe extern "C" fn fano14_report_scenario_count(report: *const Fano14Report) -> usize {
    report.as_ref().map_or(0, |r| r.inner.scenarios.len())
}

/// The report as JSON, rationals as strings. Free with [`fano14_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle from [`fano14_verify`].
#[no_mangle]
pub unsafe extern "C" fn fano14_report_json(report: *const Fano14Report) -> *mut libc::c_char {
    match report.as_ref() {
        Some(r) => into_c_string(r.inner.to_json()),
        None => {
            set_error(FANO14_NULL_POINTER, "report is NULL");
            ptr::null_mut()
        }
    }
}

/// The report as plain text. Free with [`fano14_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle from [`fano14_verify`].
#[no_mangle]
pub unsafe extern "C" fn fano14_report_text(report: *const Fano14Report) -> *mut libc::c_char {
    match report.as_ref() {
        Some(r) => into_c_string(r.inner.to_text()),
        None => {
            set_error(FANO14_NULL_POINTER, "report is NULL");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `report` must be NULL or a handle from [`fano14_verify`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fano14_report_free(report: *mut Fano14Report) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Shipped scenario names as a JSON array. Free with [`fano14_string_free`].
#[no_mangle]
pub extern "C" fn fano14_scenario_names_json() -> *mut libc::c_char {
    match DataSource::embedded().scenario_names() {
        Ok(names) => into_c_string(serde_json::to_string(&names).expect("names serialize")),
        Err(e) => {
            set_error(FANO14_DATA_ERROR, e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fano14_string_free(s: *mut libc::c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread, or NULL. Valid until the
/// next call into this library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn fano14_last_error() -> *const libc::c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn fano14_version() -> *const libc::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
