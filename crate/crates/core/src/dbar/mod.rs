//! The model Cauchy-Riemann problem `∂̄f = g f` on the 2-torus.
//!
//! The complex structure is `z = x₁ + i x₂` with `∂̄ = ½(∂₁ + i∂₂)`, so the
//! mode `m` is multiplied by `πi(m₁ + i m₂)`. The cokernel of `∂̄` on the
//! torus is the constants: a periodic invertible solution of the scalar
//! problem exists only when the mean `ĝ(0)` vanishes.

mod matrix;
mod plane;
mod scalar;

pub use matrix::{gauge_matrix, MatrixGaugeOptions};
pub use plane::{select_plane, PlaneChoice, TailIndex};
pub use scalar::{gauge_scalar, split_and_gauge, SplitGauge};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fourier::PeriodicField;
use crate::{Error, Result, C64};

/// `πi(m₁ + i m₂)`.
pub fn dbar_symbol(m: &[i64]) -> C64 {
    C64::new(-PI * m[1] as f64, PI * m[0] as f64)
}

fn require_plane(f: &PeriodicField) -> Result<()> {
    if f.lattice().dim() != 2 {
        return Err(Error::Shape(format!(
            "the ∂̄ model lives on the 2-torus, got a d={} lattice",
            f.lattice().dim()
        )));
    }
    Ok(())
}

/// Coefficientwise multiplication by the `∂̄` symbol (every component).
pub fn dbar_apply(f: &PeriodicField) -> Result<PeriodicField> {
    require_plane(f)?;
    Ok(f.map_modes(|m, c| c * dbar_symbol(m)))
}

/// Inverse of `∂̄` on mean-zero fields: the zero mode of the input is
/// ignored and the output is mean-zero.
pub fn dbar_inverse(u: &PeriodicField) -> Result<PeriodicField> {
    require_plane(u)?;
    let out = u.map_modes(|m, c| {
        if m == [0, 0] {
            C64::new(0.0, 0.0)
        } else {
            c / dbar_symbol(m)
        }
    });
    Ok(out.without_mean())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeVerdict {
    Converged,
    Obstructed,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub update_norm: f64,
    /// `ℓ²` norm of the mean removed from `G·F` in this iteration.
    pub obstruction_norm: f64,
}

/// Outcome of a gauge solve. Obstruction is a result, not an error: an
/// obstructed run carries the obstruction value and no solution.
#[derive(Debug, Clone)]
pub struct GaugeResult {
    pub verdict: GaugeVerdict,
    /// `ĝ(0)` for scalar input, the row-major mean of `G·F` for matrices.
    pub obstruction: Vec<C64>,
    pub f: Option<PeriodicField>,
    /// `h` with `f = e^h` (scalar case only).
    pub h: Option<PeriodicField>,
    /// `‖∂̄f − g f‖_{L₂}`, including modes beyond the lattice.
    pub residual: Option<f64>,
    /// `min |f|` (scalar) or `min |det f|` (matrix) over the quadrature grid.
    pub margin: Option<f64>,
    pub trace: Vec<IterationRecord>,
}

impl GaugeResult {
    fn obstructed(obstruction: Vec<C64>) -> Self {
        Self {
            verdict: GaugeVerdict::Obstructed,
            obstruction,
            f: None,
            h: None,
            residual: None,
            margin: None,
            trace: Vec::new(),
        }
    }
}

/// `‖∂̄f − g·f‖_{L₂}` where the product keeps its modes beyond the lattice.
pub fn gauge_residual(g: &PeriodicField, f: &PeriodicField) -> Result<f64> {
    let product = g.convolve(f)?;
    let diff = dbar_apply(f)?.sub(&product.field)?;
    Ok((diff.l2_norm().powi(2) + product.truncation_loss.powi(2)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{Lattice, Rank};

    #[test]
    fn dbar_examples() {
        let lat = Lattice::new(2, 3).unwrap();
        let one = PeriodicField::constant(&lat, C64::new(1.0, 0.0));
        assert_eq!(dbar_apply(&one).unwrap().l2_norm(), 0.0);
        let u = PeriodicField::single_mode(&lat, &[1, 0], C64::new(1.0, 0.0)).unwrap();
        assert_eq!(dbar_apply(&u).unwrap().get(0, &[1, 0]), C64::new(0.0, PI));
        let u = PeriodicField::single_mode(&lat, &[1, 1], C64::new(1.0, 0.0)).unwrap();
        let expect = C64::new(0.0, PI) * C64::new(1.0, 1.0);
        assert!((dbar_apply(&u).unwrap().get(0, &[1, 1]) - expect).norm() < 1e-15);
    }

    #[test]
    fn inverse_is_exact_on_mean_zero_fields() {
        let lat = Lattice::new(2, 4).unwrap();
        let coeffs = (0..lat.len()).map(|i| C64::new((i as f64).cos(), (i as f64 * 0.7).sin())).collect();
        let u = PeriodicField::from_coefficients(&lat, Rank::Scalar, coeffs).unwrap().without_mean();
        let back = dbar_apply(&dbar_inverse(&u).unwrap()).unwrap();
        for (a, b) in back.coefficients().iter().zip(u.coefficients()) {
            assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
        }
    }

    #[test]
    fn requires_two_dimensions() {
        let lat = Lattice::new(3, 1).unwrap();
        assert!(dbar_apply(&PeriodicField::zeros(&lat, Rank::Scalar)).is_err());
    }
}
