//! Truncated Fourier-lattice arithmetic on the torus.

mod field;
mod grid;
mod lattice;
pub mod literal;

pub use field::{lambda_weight, LambdaDirection, PeriodicField, Product, Rank, SobolevReport};
pub use grid::{smooth_size, QuadratureGrid, Spectrum};
pub use lattice::{Lattice, MemoryBudget, MEMORY_BUDGET_ENV};
