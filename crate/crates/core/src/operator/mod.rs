//! Assembly of `H(k) = (D + k + A)² + V` in the truncated Fourier basis.

mod assemble;
mod oracle;
mod relative_bound;

pub use assemble::{gauge_shift, AssembledOperator, MagneticHamiltonian};
pub use relative_bound::{estimate_relative_bound, RelativeBoundReport};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// The quasimomentum family `k = 2π(β + iρ)e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexQuasimomentum {
    direction: Vec<f64>,
    beta: f64,
    rho: f64,
}

impl ComplexQuasimomentum {
    pub fn new(direction: Vec<f64>, beta: f64, rho: f64) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("direction e must be a unit vector, |e| = {norm}")));
        }
        if !(rho >= 0.0) || !beta.is_finite() || !rho.is_finite() {
            return Err(Error::Domain(format!("need finite β and ρ ≥ 0, got β={beta}, ρ={rho}")));
        }
        Ok(Self { direction, beta, rho })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn is_real(&self) -> bool {
        self.rho == 0.0
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// `k_j = 2πβ e_j + i 2πρ e_j`.
    pub fn value(&self) -> Vec<C64> {
        self.direction
            .iter()
            .map(|&e| C64::new(2.0 * PI * self.beta * e, 2.0 * PI * self.rho * e))
            .collect()
    }
}

/// Principal symbol `H₀(k, m) = (2πm + k)²` (bilinear square, no
/// conjugation).
pub fn symbol_h0(k: &[C64], m: &[i64]) -> C64 {
    k.iter()
        .zip(m)
        .map(|(kj, &mj)| {
            let t = kj + 2.0 * PI * mj as f64;
            t * t
        })
        .sum()
}

/// The expanded form `4π²[(m+βe)² − ρ² + 2iρ e·(m+βe)]`.
pub fn symbol_h0_expanded(k: &ComplexQuasimomentum, m: &[i64]) -> C64 {
    let (beta, rho) = (k.beta(), k.rho());
    let mut shifted_sq = 0.0;
    let mut along = 0.0;
    for (&e, &mj) in k.direction().iter().zip(m) {
        let w = mj as f64 + beta * e;
        shifted_sq += w * w;
        along += e * w;
    }
    4.0 * PI * PI * C64::new(shifted_sq - rho * rho, 2.0 * rho * along)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: &[f64], beta: f64, rho: f64) -> ComplexQuasimomentum {
        ComplexQuasimomentum::new(e.to_vec(), beta, rho).unwrap()
    }

    #[test]
    fn symbol_examples() {
        let p2 = 4.0 * PI * PI;
        let k = q(&[1.0, 0.0], 0.0, 1.0);
        let s0 = symbol_h0(&k.value(), &[0, 0]);
        assert!((s0 - C64::new(-p2, 0.0)).norm() < 1e-10 * p2);
        let s1 = symbol_h0(&k.value(), &[1, 0]);
        assert!((s1 - C64::new(0.0, 2.0 * p2)).norm() < 1e-10 * p2);

        let real = q(&[1.0, 0.0], 0.3, 0.0);
        for m in [[0i64, 0], [2, -1], [-3, 4]] {
            let s = symbol_h0(&real.value(), &m);
            assert_eq!(s.im, 0.0);
            let w = (m[0] as f64 + 0.3).powi(2) + (m[1] as f64).powi(2);
            assert!((s.re - p2 * w).abs() < 1e-12 * p2 * w.max(1.0));
        }
    }

    #[test]
    fn closed_forms_agree() {
        let k = q(&[0.6, 0.8], 0.37, 12.5);
        for m in [[0i64, 0], [5, -3], [-7, 11], [16, 16]] {
            let a = symbol_h0(&k.value(), &m);
            let b = symbol_h0_expanded(&k, &m);
            assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()), "{m:?}: {a} vs {b}");
        }
    }

    #[test]
    fn shift_covariance() {
        let k = q(&[1.0, 0.0], 0.5, 3.0);
        let kv = k.value();
        let p = [2i64, -1];
        let shifted: Vec<C64> = kv.iter().zip(p).map(|(x, pj)| x + 2.0 * PI * pj as f64).collect();
        for m in [[0i64, 0], [1, 1], [-4, 2]] {
            let mp = [m[0] + p[0], m[1] + p[1]];
            let a = symbol_h0(&shifted, &m);
            let b = symbol_h0(&kv, &mp);
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn quasimomentum_invariants() {
        assert!(ComplexQuasimomentum::new(vec![1.0, 1.0], 0.0, 1.0).is_err());
        assert!(ComplexQuasimomentum::new(vec![1.0], 0.0, -1.0).is_err());
        let k = q(&[0.6, 0.8], 0.25, 0.0);
        assert!(k.is_real());
        assert!(k.value().iter().all(|z| z.im == 0.0));
        let k = q(&[0.6, 0.8], 0.25, 2.0);
        assert!(!k.is_real());
        assert_eq!(k.value(), k.clone().value());
    }
}
