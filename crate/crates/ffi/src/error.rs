use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use torus_spectral::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Tolerance = 4,
    Budget = 5,
    Domain = 6,
    Shape = 7,
    Rank = 8,
    Classification = 9,
    Precondition = 10,
    Integrity = 11,
    Backend = 12,
    Io = 13,
    Panic = 14,
}

impl From<&Error> for TsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Budget { .. } => TsStatus::Budget,
            Error::Shape(_) => TsStatus::Shape,
            Error::Domain(_) => TsStatus::Domain,
            Error::Integrity(_) => TsStatus::Integrity,
            Error::Classification { .. } => TsStatus::Classification,
            Error::Rank { .. } => TsStatus::Rank,
            Error::Tolerance { .. } => TsStatus::Tolerance,
            Error::Precondition(_) => TsStatus::Precondition,
            Error::Config { .. } | Error::Literal { .. } => TsStatus::Config,
            Error::Backend(_) => TsStatus::Backend,
            Error::Io(_) => TsStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

pub(crate) fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

pub(crate) struct Failure(pub TsStatus, pub String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(TsStatus::from(&e), e.to_string())
    }
}

pub(crate) fn null() -> Failure {
    Failure(TsStatus::NullPointer, "null pointer argument".into())
}

pub(crate) fn invalid(message: impl Into<String>) -> Failure {
    Failure(TsStatus::InvalidArgument, message.into())
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last error message.
pub(crate) fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {message}"));
            TsStatus::Panic
        }
    }
}

pub(crate) unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null());
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| invalid("string argument is not valid UTF-8"))
}

pub(crate) unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

pub(crate) unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

pub(crate) fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
