//! Independent reference computations for convolution and assembly.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_spectral::fourier::{Lattice, PeriodicField, Rank};
use torus_spectral::operator::MagneticHamiltonian;
use torus_spectral::C64;

fn random_scalar(lat: &Lattice, rng: &mut ChaCha8Rng) -> PeriodicField {
    let coeffs = (0..lat.len())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    PeriodicField::from_coefficients(lat, Rank::Scalar, coeffs).unwrap()
}

/// `(uv)^(m) = Σ_{p+q=m} û(p) v̂(q)` by direct double sum, restricted to the
/// lattice.
fn direct_convolution(u: &PeriodicField, v: &PeriodicField) -> Vec<C64> {
    let lat = u.lattice();
    let mut out = vec![C64::new(0.0, 0.0); lat.len()];
    for (i, p) in lat.modes().enumerate() {
        for (j, q) in lat.modes().enumerate() {
            let m: Vec<i64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
            if let Some(k) = lat.index_of(&m) {
                out[k] += u.component(0)[i] * v.component(0)[j];
            }
        }
    }
    out
}

#[test]
fn convolution_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (d, n) in [(1, 7), (2, 3), (3, 2)] {
        let lat = Lattice::new(d, n).unwrap();
        let u = random_scalar(&lat, &mut rng);
        let v = random_scalar(&lat, &mut rng);
        let fast = u.convolve(&v).unwrap().field;
        let direct = direct_convolution(&u, &v);
        for (a, b) in fast.component(0).iter().zip(&direct) {
            assert!((a - b).norm() <= 1e-12, "d={d}: {a} vs {b}");
        }
    }
}

/// `H_{mm'} = (2πm+k)² δ + (2π(m+m')+2k)·Â(m−m') + (A·A)^(m−m') + V̂(m−m')`
/// in one dimension, with `A·A` summed over all pairs of modes.
fn entry_1d(a: &PeriodicField, v: &PeriodicField, k: C64, m: i64, mp: i64) -> C64 {
    let lat = a.lattice();
    let n = lat.cutoff() as i64;
    let coeff = |f: &PeriodicField, q: i64| if q.abs() <= n { f.get(0, &[q]) } else { C64::new(0.0, 0.0) };
    let diff = m - mp;
    let mut a_sq = C64::new(0.0, 0.0);
    for p in -n..=n {
        a_sq += coeff(a, p) * coeff(a, diff - p);
    }
    let kinetic = if m == mp { (2.0 * PI * m as f64 + k).powi(2) } else { C64::new(0.0, 0.0) };
    kinetic + (2.0 * PI * (m + mp) as f64 + 2.0 * k) * coeff(a, diff) + a_sq + coeff(v, diff)
}

#[test]
fn one_dimensional_assembly_matches_explicit_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let lat = Lattice::new(1, 6).unwrap();
    let a = PeriodicField::from_coefficients(&lat, Rank::Vector, random_scalar(&lat, &mut rng).coefficients().to_vec()).unwrap();
    let v = random_scalar(&lat, &mut rng);
    let h = MagneticHamiltonian::new(&lat, Some(a.clone()), Some(v.clone())).unwrap();
    let k = C64::new(0.7, -2.5);
    let op = h.assemble_at(&[k], None).unwrap();
    let scale = op.max_abs();
    for (i, m) in lat.modes().enumerate() {
        for (j, mp) in lat.modes().enumerate() {
            let expect = entry_1d(&a, &v, k, m[0], mp[0]);
            assert!((op.entry(i, j) - expect).norm() <= 1e-12 * scale, "({}, {})", m[0], mp[0]);
        }
    }
}

#[test]
fn free_operator_is_the_diagonal_symbol() {
    let lat = Lattice::new(2, 4).unwrap();
    let k = [C64::new(PI, 3.0), C64::new(0.0, -1.0)];
    let op = MagneticHamiltonian::free(&lat).assemble_at(&k, None).unwrap();
    for (i, m) in lat.modes().enumerate() {
        for j in 0..lat.len() {
            let expect = if i == j {
                m.iter().zip(&k).map(|(&mj, kj)| (2.0 * PI * mj as f64 + kj).powi(2)).sum()
            } else {
                C64::new(0.0, 0.0)
            };
            assert!((op.entry(i, j) - expect).norm() <= 1e-12 * expect.norm().max(1.0));
        }
    }
}
