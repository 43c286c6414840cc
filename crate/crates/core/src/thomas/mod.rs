//! Lower bounds for `H(k)` at complex quasimomenta `k = 2π(β + iρ)e`.
//!
//! The principal symbol `(2πm + k)²` vanishes on the zero set
//! `{(m+βe)² = ρ², e·(m+βe) = 0}`. Away from it the symbol dominates the
//! magnetic and electric terms; near it a local model is inverted instead.
//! Gluing the local inverses over a `ρ^δ` cover of the dual lattice gives a
//! global approximate inverse `R_ρ` whose residual `R_ρ H(k)Λ_ρ⁻¹ − I` is
//! measured exactly on the truncated space.

mod cover;
mod local;
mod parametrix;
mod scan;
mod zero_set;

pub use cover::{build_cover, DualCover, Patch, PatchClass};
pub use local::{local_inverse, LocalInverse, LocalMode, NEUMANN_ORDER};
pub use parametrix::{assemble_parametrix, parametrix_at, NearPolicy, ParametrixOptions, ParametrixReport};
pub use scan::{thomas_scan, EstimateScan, ScanOptions, ScanRow};
pub use zero_set::{zero_set, ZeroSetSlab};
