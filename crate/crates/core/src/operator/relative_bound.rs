use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::fourier::{PeriodicField, Rank};
use crate::{Error, Result, C64};

/// Sampled lower estimate of the constants `C_ε` in
/// `‖Vu‖ ≤ C_ε‖u‖ + ε‖u‖_{H¹}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeBoundReport {
    pub eps: Vec<f64>,
    pub c_eps: Vec<f64>,
    /// Largest sampled `‖Vu‖ / ‖u‖`.
    pub max_ratio: f64,
    pub trials: usize,
    pub family: String,
}

/// Draws `trials` random trigonometric polynomials normalised to unit `H¹`
/// norm (Gaussian coefficients on a random sub-box of the lattice) and, for
/// each `ε`, returns the smallest `C` for which every sample satisfies the
/// inequality. This is a lower estimate of the true constant, never a bound.
///
/// `‖Vu‖` is the full `L₂` norm of the product, including the modes the
/// lattice truncation drops.
pub fn estimate_relative_bound(
    v: &PeriodicField,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<RelativeBoundReport> {
    if trials == 0 {
        return Err(Error::Precondition("relative bound estimate needs at least one trial".into()));
    }
    if v.rank() != Rank::Scalar {
        return Err(Error::Shape("relative bound needs a scalar potential".into()));
    }
    if let Some(e) = eps_grid.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::Domain(format!("ε must be nonnegative, got {e}")));
    }
    let lat = v.lattice();
    let n = lat.cutoff() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c_eps = vec![0.0f64; eps_grid.len()];
    let mut max_ratio = 0.0f64;
    for _ in 0..trials {
        let radius = rng.random_range(0..=n);
        let coeffs: Vec<C64> = lat
            .modes()
            .map(|m| {
                if m.iter().all(|c| c.abs() <= radius) {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let u = PeriodicField::from_coefficients(lat, Rank::Scalar, coeffs)?;
        let h1 = u.sobolev_norm(1.0).norm;
        let u = u.scale(C64::new(1.0 / h1, 0.0));
        let l2 = u.l2_norm();
        let product = v.convolve(&u)?;
        let vu = (product.field.l2_norm().powi(2) + product.truncation_loss.powi(2)).sqrt();
        max_ratio = max_ratio.max(vu / l2);
        for (c, eps) in c_eps.iter_mut().zip(eps_grid) {
            // u has unit H¹ norm
            *c = c.max(((vu - eps) / l2).max(0.0));
        }
    }
    Ok(RelativeBoundReport {
        eps: eps_grid.to_vec(),
        c_eps,
        max_ratio,
        trials,
        family: format!(
            "Gaussian coefficients on random sub-boxes max|m_i| <= r, r uniform in 0..={n}, unit H^1 norm; seed {seed}"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;

    #[test]
    fn zero_potential() {
        let lat = Lattice::new(1, 6).unwrap();
        let v = PeriodicField::zeros(&lat, Rank::Scalar);
        let r = estimate_relative_bound(&v, &[0.0, 0.1, 1.0], 20, 1).unwrap();
        assert!(r.c_eps.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn constant_potential() {
        let lat = Lattice::new(2, 4).unwrap();
        let v = PeriodicField::constant(&lat, C64::new(5.0, 0.0));
        let r = estimate_relative_bound(&v, &[0.0], 30, 3).unwrap();
        assert!((r.c_eps[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn mathieu_potential_is_bounded_by_sup_norm() {
        let lat = Lattice::new(1, 8).unwrap();
        let mut v = PeriodicField::zeros(&lat, Rank::Scalar);
        v.set(0, &[1], C64::new(1.0, 0.0)).unwrap();
        v.set(0, &[-1], C64::new(1.0, 0.0)).unwrap();
        let r = estimate_relative_bound(&v, &[0.0, 0.5], 200, 11).unwrap();
        assert!(r.c_eps[0] <= 2.0 + 1e-12);
        assert!((r.c_eps[0] - r.max_ratio).abs() < 1e-15);
        assert!(r.c_eps[1] <= r.c_eps[0]);
    }

    #[test]
    fn estimate_grows_with_the_family() {
        let lat = Lattice::new(1, 8).unwrap();
        let mut v = PeriodicField::zeros(&lat, Rank::Scalar);
        v.set(0, &[2], C64::new(0.5, 0.5)).unwrap();
        v.set(0, &[-2], C64::new(0.5, -0.5)).unwrap();
        let small = estimate_relative_bound(&v, &[0.2], 10, 5).unwrap();
        let large = estimate_relative_bound(&v, &[0.2], 100, 5).unwrap();
        assert!(large.c_eps[0] >= small.c_eps[0]);
    }

    #[test]
    fn zero_trials_rejected() {
        let lat = Lattice::new(1, 2).unwrap();
        let v = PeriodicField::zeros(&lat, Rank::Scalar);
        assert!(estimate_relative_bound(&v, &[0.0], 0, 0).is_err());
    }
}
