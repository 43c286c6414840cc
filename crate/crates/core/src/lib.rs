//! Fourier-basis machinery for periodic magnetic Schrödinger operators
//! `H(k) = (D + k + A(x))² + V(x)` on the torus `T^d = R^d / Z^d`.
//!
//! The crate is organised bottom-up:
//!
//! - [`fourier`]: truncated Fourier lattices, periodic fields, convolution,
//!   Sobolev norms and the `Λ_ρ` multiplier.
//! - [`operator`]: assembly of `H(k)` for real or complex quasimomenta, an
//!   independent quadrature oracle, gauge shifts and a sampled relative-bound
//!   estimator for the electric potential.
//! - [`bloch`]: real-quasimomentum band tables and flat-band detection.
//! - [`linalg`]: smallest/largest singular values (dense and iterative).
//! - [`thomas`]: complex-quasimomentum lower-bound scans, the zero set of the
//!   principal symbol, the `ρ^δ` dual-space cover, local approximate inverses
//!   and the global parametrix residual.
//! - [`dbar`]: the model Cauchy-Riemann problem `∂̄f = g f` on the 2-torus,
//!   its obstruction, tail splitting, rational plane choice and the matrix
//!   variant.
//! - [`cli`]: configuration, presets and the batch runner behind the
//!   `torus-spectral` binary.
//!
//! Conventions: `D_j = -i ∂/∂x_j`, modes `m ∈ Z^d` act as `e^{2πi m·x}`, and
//! complex quasimomenta are parameterised as `k = 2π(β + iρ)e`.

pub mod bloch;
pub mod cli;
pub mod dbar;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod operator;
pub mod thomas;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
