//! Independent application of `(D + k + A)² + V` by pointwise evaluation on
//! a quadrature grid. Shares no code with the matrix assembly beyond the
//! field containers.

use std::f64::consts::PI;

use super::MagneticHamiltonian;
use crate::fourier::{Lattice, PeriodicField, QuadratureGrid, Rank};
use crate::{Error, Result, C64};

impl MagneticHamiltonian {
    /// Applies the operator to the trigonometric polynomial `u` and returns
    /// the in-lattice coefficients of the result.
    ///
    /// Every product is formed on a grid of at least `4N + 1` points per
    /// axis, so the in-band modes are free of aliasing.
    pub fn apply_oracle(&self, k: &[C64], u: &PeriodicField) -> Result<PeriodicField> {
        let lat = self.lattice();
        let d = lat.dim();
        if u.lattice() != lat || u.rank() != Rank::Scalar {
            return Err(Error::Shape("oracle input must be a scalar field on the operator lattice".into()));
        }
        if k.len() != d {
            return Err(Error::Shape(format!("k has dimension {}, lattice {d}", k.len())));
        }
        let grid = QuadratureGrid::for_products(lat);
        let wide = Lattice::new_unchecked(d, 2 * lat.cutoff());
        let u_vals = grid.synthesize(lat, u.component(0));
        let a_vals: Option<Vec<Vec<C64>>> = self
            .magnetic()
            .map(|a| (0..d).map(|j| grid.synthesize(lat, a.component(j))).collect());

        let mut total = vec![C64::new(0.0, 0.0); grid.len()];
        for axis in 0..d {
            // w = (D_j + k_j + A_j) u
            let du: Vec<C64> = lat
                .modes()
                .zip(u.component(0))
                .map(|(m, c)| c * (k[axis] + 2.0 * PI * m[axis] as f64))
                .collect();
            let mut w = grid.synthesize(lat, &du);
            if let Some(a) = &a_vals {
                for ((wi, ai), ui) in w.iter_mut().zip(&a[axis]).zip(&u_vals) {
                    *wi += ai * ui;
                }
            }
            // (D_j + k_j) w, differentiating w spectrally on the doubled box
            let w_hat = grid.analyze(w.clone()).restrict(&wide);
            let dw: Vec<C64> = wide
                .modes()
                .zip(&w_hat)
                .map(|(m, c)| c * (k[axis] + 2.0 * PI * m[axis] as f64))
                .collect();
            let dw_vals = grid.synthesize(&wide, &dw);
            for (t, x) in total.iter_mut().zip(&dw_vals) {
                *t += x;
            }
            if let Some(a) = &a_vals {
                for ((t, ai), wi) in total.iter_mut().zip(&a[axis]).zip(&w) {
                    *t += ai * wi;
                }
            }
        }
        if let Some(v) = self.electric() {
            let v_vals = grid.synthesize(lat, v.component(0));
            for ((t, vi), ui) in total.iter_mut().zip(&v_vals).zip(&u_vals) {
                *t += vi * ui;
            }
        }
        let coeffs = grid.analyze(total).restrict(lat);
        PeriodicField::from_coefficients(lat, Rank::Scalar, coeffs)
    }
}
