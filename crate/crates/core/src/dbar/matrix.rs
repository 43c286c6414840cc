//! Experimental non-commutative gauge: find an invertible periodic matrix
//! function `F` with `∂̄F = G F`.

use super::{dbar_apply, dbar_inverse, require_plane, GaugeResult, GaugeVerdict, IterationRecord};
use crate::fourier::{PeriodicField, QuadratureGrid, Rank};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixGaugeOptions {
    pub max_iterations: usize,
    /// Stop when the update norm falls below `tol · max(1, ‖F‖)`; also the
    /// threshold on the removed mean that separates converged from
    /// obstructed.
    pub tol: f64,
    /// `F ← (1 − ω)F + ω·(I + ∂̄⁻¹P_{≠0}(G F))`.
    pub damping: f64,
}

impl Default for MatrixGaugeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tol: 1e-13,
            damping: 1.0,
        }
    }
}

const BLOWUP: f64 = 1e12;

fn identity(lat: &crate::fourier::Lattice, q: usize) -> Result<PeriodicField> {
    let parts: Vec<PeriodicField> = (0..q * q)
        .map(|c| {
            let v = if c / q == c % q { 1.0 } else { 0.0 };
            PeriodicField::constant(lat, C64::new(v, 0.0))
        })
        .collect();
    PeriodicField::stack(Rank::Matrix(q), &parts)
}

/// Picard iteration `F ← I + ∂̄⁻¹P_{≠0}(G·F)` with `P_{≠0}` removing the mean.
/// The removed mean is logged each iteration as the running obstruction.
pub fn gauge_matrix(g: &PeriodicField, options: &MatrixGaugeOptions) -> Result<GaugeResult> {
    require_plane(g)?;
    let q = match g.rank() {
        Rank::Matrix(q) => q,
        r => return Err(Error::Shape(format!("matrix gauge needs a matrix field, got {r:?}"))),
    };
    if g.mean().iter().any(|c| *c != C64::new(0.0, 0.0)) {
        return Err(Error::Precondition("matrix gauge requires mean(G) = 0".into()));
    }
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::Domain(format!("damping must lie in (0, 1], got {}", options.damping)));
    }
    let lat = g.lattice();
    let id = identity(lat, q)?;
    let omega = C64::new(options.damping, 0.0);
    let mut f = id.clone();
    let mut trace = Vec::new();
    let mut verdict = GaugeVerdict::Diverged;
    let mut mean = vec![C64::new(0.0, 0.0); q * q];
    for iteration in 1..=options.max_iterations {
        let gf = g.convolve(&f)?.field;
        mean = gf.mean();
        let obstruction_norm = mean.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let target = id.add(&dbar_inverse(&gf)?)?;
        let next = f.scale(C64::new(1.0, 0.0) - omega).add(&target.scale(omega))?;
        let update_norm = next.sub(&f)?.l2_norm();
        f = next;
        trace.push(IterationRecord {
            iteration,
            update_norm,
            obstruction_norm,
        });
        if !update_norm.is_finite() || f.l2_norm() > BLOWUP {
            break;
        }
        if update_norm <= options.tol * f.l2_norm().max(1.0) {
            verdict = if obstruction_norm <= options.tol.sqrt() {
                GaugeVerdict::Converged
            } else {
                GaugeVerdict::Obstructed
            };
            break;
        }
    }
    let (residual, margin) = if verdict == GaugeVerdict::Diverged {
        (None, None)
    } else {
        let product = g.convolve(&f)?;
        let diff = dbar_apply(&f)?.sub(&product.field)?;
        let residual = (diff.l2_norm().powi(2) + product.truncation_loss.powi(2)).sqrt();
        (Some(residual), Some(min_abs_det(&f, q)))
    };
    Ok(GaugeResult {
        verdict,
        obstruction: mean,
        f: Some(f),
        h: None,
        residual,
        margin,
        trace,
    })
}

fn min_abs_det(f: &PeriodicField, q: usize) -> f64 {
    let lat = f.lattice();
    let grid = QuadratureGrid::for_products(lat);
    let values: Vec<Vec<C64>> = (0..q * q).map(|c| grid.synthesize(lat, f.component(c))).collect();
    (0..grid.len())
        .map(|x| {
            let mut a: Vec<C64> = values.iter().map(|v| v[x]).collect();
            determinant(&mut a, q).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Determinant of a small row-major matrix by Gaussian elimination with
/// partial pivoting (destroys the input).
fn determinant(a: &mut [C64], q: usize) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for col in 0..q {
        let pivot = (col..q)
            .max_by(|&i, &j| a[i * q + col].norm().total_cmp(&a[j * q + col].norm()))
            .unwrap_or(col);
        if a[pivot * q + col] == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..q {
                a.swap(pivot * q + j, col * q + j);
            }
            det = -det;
        }
        let p = a[col * q + col];
        det *= p;
        for i in col + 1..q {
            let factor = a[i * q + col] / p;
            for j in col..q {
                let sub = factor * a[col * q + j];
                a[i * q + j] -= sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;

    #[test]
    fn zero_g_gives_identity() {
        let lat = Lattice::new(2, 4).unwrap();
        let r = gauge_matrix(&PeriodicField::zeros(&lat, Rank::Matrix(2)), &MatrixGaugeOptions::default()).unwrap();
        assert_eq!(r.verdict, GaugeVerdict::Converged);
        let diff = r.f.unwrap().sub(&identity(&lat, 2).unwrap()).unwrap();
        assert_eq!(diff.l2_norm(), 0.0);
        assert_eq!(r.margin, Some(1.0));
    }

    #[test]
    fn determinant_of_small_matrices() {
        let c = |x: f64| C64::new(x, 0.0);
        let mut a = vec![c(1.0), c(2.0), c(3.0), c(4.0)];
        assert!((determinant(&mut a, 2) - c(-2.0)).norm() < 1e-15);
        let mut b = vec![c(0.0), c(1.0), c(0.0), c(1.0), c(0.0), c(0.0), c(0.0), c(0.0), c(5.0)];
        assert!((determinant(&mut b, 3) - c(-5.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_nonzero_mean() {
        let lat = Lattice::new(2, 2).unwrap();
        let mut g = PeriodicField::zeros(&lat, Rank::Matrix(2));
        g.set(1, &[0, 0], C64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            gauge_matrix(&g, &MatrixGaugeOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn large_g_diverges_without_failing() {
        let lat = Lattice::new(2, 4).unwrap();
        let mut g = PeriodicField::zeros(&lat, Rank::Matrix(2));
        for c in 0..4 {
            g.set(c, &[1, 0], C64::new(40.0, 0.0)).unwrap();
            g.set(c, &[0, -1], C64::new(0.0, 35.0)).unwrap();
        }
        let opts = MatrixGaugeOptions {
            max_iterations: 30,
            ..Default::default()
        };
        let r = gauge_matrix(&g, &opts).unwrap();
        assert_eq!(r.verdict, GaugeVerdict::Diverged);
        assert!(r.residual.is_none());
    }

    fn smooth_scalar(lat: &crate::fourier::Lattice, entries: &[([i64; 2], C64)]) -> PeriodicField {
        let mut g = PeriodicField::zeros(lat, Rank::Scalar);
        for (m, c) in entries {
            g.set(0, m, *c).unwrap();
        }
        g
    }

    #[test]
    fn diagonal_matches_scalar_gauges() {
        let lat = Lattice::new(2, 16).unwrap();
        let g1 = smooth_scalar(&lat, &[([1, 0], C64::new(0.4, 0.1)), ([0, -1], C64::new(-0.2, 0.3))]);
        let g2 = smooth_scalar(&lat, &[([1, 1], C64::new(0.0, 0.5)), ([-1, 0], C64::new(0.3, 0.0))]);
        let z = PeriodicField::zeros(&lat, Rank::Scalar);
        let g = PeriodicField::stack(Rank::Matrix(2), &[g1.clone(), z.clone(), z, g2.clone()]).unwrap();
        let r = gauge_matrix(&g, &MatrixGaugeOptions::default()).unwrap();
        assert_eq!(r.verdict, GaugeVerdict::Converged);
        assert!(r.residual.unwrap() <= 1e-9);
        let f = r.f.unwrap();
        for (c, gi) in [(0, &g1), (3, &g2)] {
            // the iteration fixes mean(F) = I, so compare against f / mean(f)
            let s = super::super::gauge_scalar(gi, 1e-9).unwrap().f.unwrap();
            let s = s.scale(C64::new(1.0, 0.0) / s.mean()[0]);
            assert!(f.component_field(c).sub(&s).unwrap().l2_norm() <= 1e-9);
        }
        for c in [1, 2] {
            assert!(f.component_field(c).l2_norm() <= 1e-9);
        }
    }

    #[test]
    fn nilpotent_is_one_step() {
        let lat = Lattice::new(2, 8).unwrap();
        let g = smooth_scalar(&lat, &[([2, -1], C64::new(1.5, -0.5)), ([0, 3], C64::new(0.0, 2.0))]);
        let z = PeriodicField::zeros(&lat, Rank::Scalar);
        let big = PeriodicField::stack(Rank::Matrix(2), &[z.clone(), g.clone(), z.clone(), z]).unwrap();
        let r = gauge_matrix(&big, &MatrixGaugeOptions::default()).unwrap();
        assert_eq!(r.verdict, GaugeVerdict::Converged);
        assert!(r.residual.unwrap() <= 1e-10);
        let f = r.f.unwrap();
        let h = dbar_inverse(&g).unwrap();
        let expected = [
            PeriodicField::constant(&lat, C64::new(1.0, 0.0)),
            h,
            PeriodicField::zeros(&lat, Rank::Scalar),
            PeriodicField::constant(&lat, C64::new(1.0, 0.0)),
        ];
        for (c, e) in expected.iter().enumerate() {
            assert!(f.component_field(c).sub(e).unwrap().l2_norm() <= 1e-10);
        }
        assert!((r.margin.unwrap() - 1.0).abs() < 1e-12);
    }
}
