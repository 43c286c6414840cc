use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::PotentialSpec;
use crate::fourier::literal::parse_field;
use crate::fourier::{Lattice, PeriodicField, Rank};
use crate::{Error, Result, C64};

fn unit(d: usize) -> Vec<i64> {
    let mut q = vec![0; d];
    q[0] = 1;
    q
}

/// `amp/2` at `±q` in component `c`.
fn cosine(lattice: &Lattice, rank: Rank, amp: f64, q: &[i64], c: usize) -> Result<PeriodicField> {
    let d = lattice.dim();
    let components = rank.components(d);
    if c >= components {
        return Err(Error::config("potentials", format!("component {c} out of range for {components} components")));
    }
    if q.len() != d {
        return Err(Error::config("potentials", format!("q must have {d} entries")));
    }
    let mut f = PeriodicField::zeros(lattice, rank);
    let neg: Vec<i64> = q.iter().map(|x| -x).collect();
    if !lattice.contains(q) {
        return Err(Error::config("potentials", format!("q = {q:?} lies outside the lattice")));
    }
    let half = C64::new(amp / 2.0, 0.0);
    if q.iter().all(|&x| x == 0) {
        f.set(c, q, C64::new(amp, 0.0))?;
    } else {
        f.set(c, q, half)?;
        f.set(c, &neg, half)?;
    }
    f.into_real()
}

/// Builds the field named by `spec` on `lattice` with the given rank.
/// `seed` drives `gauss-decay` unless the preset carries its own.
pub fn preset_potential(spec: &PotentialSpec, lattice: &Lattice, rank: Rank, seed: u64) -> Result<PeriodicField> {
    let d = lattice.dim();
    let field = match spec {
        PotentialSpec::Cos { amp, q, component, .. } => {
            let q = q.clone().unwrap_or_else(|| unit(d));
            cosine(lattice, rank, *amp, &q, component.unwrap_or(0))?
        }
        PotentialSpec::Mathieu { c, component, .. } => cosine(lattice, rank, 2.0 * c, &unit(d), component.unwrap_or(0))?,
        PotentialSpec::SingleModeA { amp, q, component, .. } => {
            if rank != Rank::Vector {
                return Err(Error::config("potentials", "single-mode-A is a vector potential"));
            }
            let q = q.clone().unwrap_or_else(|| unit(d));
            cosine(lattice, rank, *amp, &q, component.unwrap_or(d - 1))?
        }
        PotentialSpec::GaussDecay {
            amp,
            w,
            seed: own,
            mean_zero,
            ..
        } => {
            if !(*w > 0.0) {
                return Err(Error::config("potentials", format!("gauss-decay width must be positive, got {w}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(own.unwrap_or(seed));
            let mut f = PeriodicField::zeros(lattice, rank);
            let weights: Vec<f64> = (0..lattice.len()).map(|i| amp * (-lattice.norm_sq(i) / w).exp()).collect();
            for c in 0..f.components() {
                for (x, wt) in f.component_mut(c).iter_mut().zip(&weights) {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    *x = C64::new(re, im) * wt;
                }
            }
            let f = f.symmetrized();
            if *mean_zero {
                f.without_mean()
            } else {
                f
            }
        }
        PotentialSpec::Constant { re, im } => {
            if rank != Rank::Scalar {
                return Err(Error::config("potentials", "constant presets are scalar"));
            }
            let f = PeriodicField::constant(lattice, C64::new(*re, *im));
            if *im == 0.0 {
                f.into_real()?
            } else {
                f
            }
        }
        PotentialSpec::Literal { text } => check_literal(parse_field(text)?, lattice, rank)?,
        PotentialSpec::File { path } => check_literal(parse_field(&std::fs::read_to_string(Path::new(path))?)?, lattice, rank)?,
    };
    Ok(field)
}

fn check_literal(f: PeriodicField, lattice: &Lattice, rank: Rank) -> Result<PeriodicField> {
    if f.lattice() != lattice || f.rank() != rank {
        return Err(Error::config(
            "potentials",
            format!(
                "literal is a {:?} field with d={}, N={}; expected {rank:?} with d={}, N={}",
                f.rank(),
                f.lattice().dim(),
                f.lattice().cutoff(),
                lattice.dim(),
                lattice.cutoff()
            ),
        ));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_and_mathieu_coefficients() {
        let lat = Lattice::new(1, 4).unwrap();
        let cos = PotentialSpec::Cos {
            amp: 1.0,
            q: None,
            component: None,
            s: None,
        };
        let f = preset_potential(&cos, &lat, Rank::Scalar, 0).unwrap();
        assert_eq!(f.get(0, &[1]), C64::new(0.5, 0.0));
        assert_eq!(f.get(0, &[-1]), C64::new(0.5, 0.0));
        assert!(f.is_real());
        let m = PotentialSpec::Mathieu {
            c: 1.0,
            component: None,
            s: None,
        };
        let f = preset_potential(&m, &lat, Rank::Scalar, 0).unwrap();
        assert_eq!(f.get(0, &[1]), C64::new(1.0, 0.0));
        assert_eq!(f.get(0, &[-1]), C64::new(1.0, 0.0));
        assert_eq!(f.l2_norm(), 2f64.sqrt());
    }

    #[test]
    fn gauss_decay_is_seeded() {
        let lat = Lattice::new(2, 4).unwrap();
        let spec = PotentialSpec::GaussDecay {
            amp: 1.0,
            w: 2.0,
            seed: Some(7),
            mean_zero: true,
            s: None,
        };
        let a = preset_potential(&spec, &lat, Rank::Vector, 0).unwrap();
        let b = preset_potential(&spec, &lat, Rank::Vector, 99).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        assert!(a.is_real() && a.is_mean_zero());
        let unseeded = PotentialSpec::GaussDecay {
            amp: 1.0,
            w: 2.0,
            seed: None,
            mean_zero: true,
            s: None,
        };
        let c = preset_potential(&unseeded, &lat, Rank::Vector, 1).unwrap();
        let e = preset_potential(&unseeded, &lat, Rank::Vector, 2).unwrap();
        assert_ne!(c.coefficients(), e.coefficients());
    }

    #[test]
    fn single_mode_a_is_transverse() {
        let lat = Lattice::new(2, 3).unwrap();
        let spec = PotentialSpec::SingleModeA {
            amp: 0.3,
            q: None,
            component: None,
            s: None,
        };
        let a = preset_potential(&spec, &lat, Rank::Vector, 0).unwrap();
        assert_eq!(a.get(1, &[1, 0]), C64::new(0.15, 0.0));
        assert_eq!(a.component_field(0).l2_norm(), 0.0);
        assert!(preset_potential(&spec, &lat, Rank::Scalar, 0).is_err());
    }

    #[test]
    fn literal_shape_is_checked() {
        let lat = Lattice::new(1, 2).unwrap();
        let text = "field d=1 n=2 rank=scalar real=false mean_zero=false\ncomponent 0\n1 1.0 0.0\n";
        assert!(preset_potential(&PotentialSpec::Literal { text: text.into() }, &lat, Rank::Scalar, 0).is_ok());
        let other = Lattice::new(1, 3).unwrap();
        assert!(preset_potential(&PotentialSpec::Literal { text: text.into() }, &other, Rank::Scalar, 0).is_err());
    }
}
