//! C interface: opaque workspace handles, integer error codes, and JSON
//! report strings. All strings are UTF-8 and NUL-terminated; strings
//! returned by the library must be released with `ncc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nccech::error::NcError;
use nccech::input::Workspace;

/// Result codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NccStatus {
    /// success
    NccOk = 0,
    /// a pointer argument was null or not valid UTF-8
    NccBadArgument = 1,
    /// the workspace text failed to parse
    NccParseError = 2,
    /// a reference or precondition error in otherwise well-formed input
    NccInputError = 3,
    /// the window or length cap was too small for the computation
    NccWindowError = 4,
    /// the rewrite step budget was exhausted
    NccBudgetError = 5,
    /// an internal invariant failed
    NccInternalError = 6,
}

/// An opaque parsed workspace.
pub struct NccWorkspace {
    ws: Workspace,
    text: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap());
}

fn status_of(err: &NcError) -> NccStatus {
    match err {
        NcError::Parse { .. } => NccStatus::NccParseError,
        NcError::Input(_) => NccStatus::NccInputError,
        NcError::Window(_) => NccStatus::NccWindowError,
        NcError::StepBudget(_) => NccStatus::NccBudgetError,
    }
}

/// The message of the most recent error on this thread. The pointer is
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn ncc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses workspace text into a handle. On success writes the handle to
/// `out` and returns `NccOk`; the handle must be released with
/// `ncc_workspace_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncc_workspace_parse(
    text: *const c_char,
    out: *mut *mut NccWorkspace,
) -> NccStatus {
    if text.is_null() || out.is_null() {
        set_error("null pointer argument");
        return NccStatus::NccBadArgument;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("workspace text is not valid UTF-8");
        return NccStatus::NccBadArgument;
    };
    match catch_unwind(|| nccech::input::parse(text)) {
        Ok(Ok(ws)) => {
            *out = Box::into_raw(Box::new(NccWorkspace {
                ws,
                text: text.to_string(),
            }));
            NccStatus::NccOk
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic during parsing");
            NccStatus::NccInternalError
        }
    }
}

/// Runs a command against a parsed workspace. `keys` and `values` are
/// parallel arrays of `nargs` argument pairs (may be null when `nargs`
/// is 0). On success writes a NUL-terminated JSON report to `json_out`;
/// release it with `ncc_string_free`.
///
/// # Safety
/// All pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ncc_run(
    ws: *const NccWorkspace,
    command: *const c_char,
    keys: *const *const c_char,
    values: *const *const c_char,
    nargs: usize,
    json_out: *mut *mut c_char,
) -> NccStatus {
    if ws.is_null() || command.is_null() || json_out.is_null() {
        set_error("null pointer argument");
        return NccStatus::NccBadArgument;
    }
    if nargs > 0 && (keys.is_null() || values.is_null()) {
        set_error("null argument arrays with nonzero nargs");
        return NccStatus::NccBadArgument;
    }
    let handle = &*ws;
    let Ok(command) = CStr::from_ptr(command).to_str() else {
        set_error("command is not valid UTF-8");
        return NccStatus::NccBadArgument;
    };
    let mut args = Vec::with_capacity(nargs);
    for i in 0..nargs {
        let k = *keys.add(i);
        let v = *values.add(i);
        if k.is_null() || v.is_null() {
            set_error("null argument pair");
            return NccStatus::NccBadArgument;
        }
        let (Ok(k), Ok(v)) = (CStr::from_ptr(k).to_str(), CStr::from_ptr(v).to_str()) else {
            set_error("argument pair is not valid UTF-8");
            return NccStatus::NccBadArgument;
        };
        args.push((k.to_string(), v.to_string()));
    }
    let run = AssertUnwindSafe(|| nccech::cli::run(&handle.ws, command, &args, &handle.text));
    match catch_unwind(run) {
        Ok(Ok(report)) => {
            let json = report.to_string_pretty();
            let cleaned: String = json.chars().filter(|&c| c != '\0').collect();
            *json_out = CString::new(cleaned).unwrap().into_raw();
            NccStatus::NccOk
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic during computation");
            NccStatus::NccInternalError
        }
    }
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ncc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a workspace handle.
///
/// # Safety
/// `ws` must come from `ncc_workspace_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ncc_workspace_free(ws: *mut NccWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}
