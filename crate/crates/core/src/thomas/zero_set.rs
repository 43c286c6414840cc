use serde::{Deserialize, Serialize};

use crate::fourier::Lattice;
use crate::{Error, Result};

/// Lattice modes on and near the zero set of the principal symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetSlab {
    pub rho: f64,
    pub beta: f64,
    pub direction: Vec<f64>,
    pub thickness: f64,
    /// `(m+βe)² = ρ²` and `e·(m+βe) = 0`, up to rounding.
    pub exact: Vec<Vec<i64>>,
    /// `|e·(m+βe)| ≤ t` and `|(m+βe)² − ρ²| ≤ tρ`.
    pub near: Vec<Vec<i64>>,
}

const EXACT_TOL: f64 = 1e-9;

pub fn zero_set(rho: f64, beta: f64, direction: &[f64], lattice: &Lattice, thickness: f64) -> Result<ZeroSetSlab> {
    if !(thickness >= 0.0) {
        return Err(Error::Domain(format!("thickness must be ≥ 0, got {thickness}")));
    }
    if direction.len() != lattice.dim() {
        return Err(Error::Shape(format!(
            "direction has dimension {}, lattice {}",
            direction.len(),
            lattice.dim()
        )));
    }
    let mut exact = Vec::new();
    let mut near = Vec::new();
    for m in lattice.modes() {
        let mut sq = 0.0;
        let mut along = 0.0;
        for (&mj, &e) in m.iter().zip(direction) {
            let w = mj as f64 + beta * e;
            sq += w * w;
            along += e * w;
        }
        let radial = sq - rho * rho;
        let scale = 1.0f64.max(rho * rho);
        if along.abs() <= EXACT_TOL && radial.abs() <= EXACT_TOL * scale {
            exact.push(m.to_vec());
        }
        if along.abs() <= thickness && radial.abs() <= thickness * rho {
            near.push(m.to_vec());
        }
    }
    Ok(ZeroSetSlab {
        rho,
        beta,
        direction: direction.to_vec(),
        thickness,
        exact,
        near,
    })
}
