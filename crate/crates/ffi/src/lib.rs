//! C ABI for `torus-spectral`.
//!
//! Objects cross the boundary as opaque handles created by `ts_*_new` (or
//! a computing call) and released by the matching `ts_*_destroy`. Every
//! fallible function returns a [`TsStatus`]; on failure the message is kept
//! per thread and read with [`ts_last_error_message`]. Strings returned to C
//! are released with [`ts_string_free`].
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the duration of the call,
//! arrays must hold the stated number of elements and out-pointers must be
//! writable. Null pointers are reported as `TS_STATUS_NULL_POINTER`.
#![allow(clippy::missing_safety_doc)]

mod bands;
mod error;
mod gauge;
mod hamiltonian;
mod run;
mod scan;

pub use bands::*;
pub use error::*;
pub use gauge::*;
pub use hamiltonian::*;
pub use run::*;
pub use scan::*;
