//! Band functions `λ_n(k)` of `H(k)` over real quasimomenta and flat-band
//! detection.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::hermitian_eigenvalues;
use crate::operator::MagneticHamiltonian;
use crate::{Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    /// Real quasimomenta in `[−π, π]^d`.
    pub k_grid: Vec<Vec<f64>>,
    /// `bands[i][n] = λ_n(k_grid[i])`, ascending in `n`.
    pub bands: Vec<Vec<f64>>,
    pub band_count: usize,
    pub dim: usize,
    pub cutoff: usize,
}

/// Uniform tensor grid over the Brillouin zone `[−π, π]^d`, endpoints
/// included, first axis slowest.
pub fn brillouin_grid(d: usize, points_per_axis: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = match points_per_axis {
        0 => Vec::new(),
        1 => vec![0.0],
        p => (0..p).map(|i| -PI + 2.0 * PI * i as f64 / (p - 1) as f64).collect(),
    };
    let mut grid = vec![Vec::new()];
    for _ in 0..d {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut k = prefix.clone();
                    k.push(x);
                    k
                })
            })
            .collect();
    }
    grid
}

/// The `band_count` lowest eigenvalues of the Hermitian `H(k)` at each grid
/// point.
pub fn compute_bands(h: &MagneticHamiltonian, k_grid: &[Vec<f64>], band_count: usize) -> Result<BandTable> {
    let lat = h.lattice();
    if band_count == 0 {
        return Err(Error::Precondition("band count must be at least 1".into()));
    }
    if band_count > lat.len() {
        return Err(Error::Precondition(format!(
            "band count {band_count} exceeds the matrix dimension {}",
            lat.len()
        )));
    }
    if k_grid.is_empty() {
        return Err(Error::Precondition("empty k grid".into()));
    }
    let bands = k_grid
        .par_iter()
        .map(|k| {
            let kc: Vec<C64> = k.iter().map(|&x| C64::new(x, 0.0)).collect();
            let op = h.assemble_at(&kc, None)?;
            let defect = op.hermitian_defect();
            if defect > HERMITIAN_TOL * op.max_abs().max(1.0) {
                return Err(Error::Integrity(format!(
                    "H(k) at k={k:?} is not Hermitian (defect {defect:e}); complex data passed with a real flag?"
                )));
            }
            let mut ev = hermitian_eigenvalues(op.matrix())?;
            ev.truncate(band_count);
            Ok(ev)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandTable {
        k_grid: k_grid.to_vec(),
        bands,
        band_count,
        dim: lat.dim(),
        cutoff: lat.cutoff(),
    })
}

impl BandTable {
    pub fn band(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        self.bands.iter().map(move |row| row[n])
    }

    /// One row `k_1,…,k_d,n,lambda` per grid point and band.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.dim {
            let _ = write!(out, "k{j},");
        }
        out.push_str("n,lambda\n");
        for (k, row) in self.k_grid.iter().zip(&self.bands) {
            for (n, lambda) in row.iter().enumerate() {
                for x in k {
                    let _ = write!(out, "{x:.16e},");
                }
                let _ = writeln!(out, "{n},{lambda:.16e}");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum FlatTolerance {
    Absolute(f64),
    /// Scaled per band by `max(1, max_k |λ_n(k)|)`.
    Relative(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatBandReport {
    pub oscillations: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub flagged: Vec<usize>,
    pub tolerance: FlatTolerance,
}

/// Per-band oscillation `max_k λ_n − min_k λ_n`; a band is flagged exactly
/// when its oscillation is below its threshold.
pub fn detect_flat_bands(table: &BandTable, tolerance: FlatTolerance) -> Result<FlatBandReport> {
    if table.bands.is_empty() || table.band_count == 0 {
        return Err(Error::Precondition("band table is empty".into()));
    }
    let mut oscillations = Vec::with_capacity(table.band_count);
    let mut thresholds = Vec::with_capacity(table.band_count);
    for n in 0..table.band_count {
        let (lo, hi, scale) = table.band(n).fold(
            (f64::INFINITY, f64::NEG_INFINITY, 1.0f64),
            |(lo, hi, s), x| (lo.min(x), hi.max(x), s.max(x.abs())),
        );
        oscillations.push(hi - lo);
        thresholds.push(match tolerance {
            FlatTolerance::Absolute(t) => t,
            FlatTolerance::Relative(t) => t * scale,
        });
    }
    let flagged = (0..table.band_count)
        .filter(|&n| oscillations[n] < thresholds[n])
        .collect();
    Ok(FlatBandReport {
        oscillations,
        thresholds,
        flagged,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{Lattice, PeriodicField, Rank};

    fn mathieu(lat: &Lattice) -> MagneticHamiltonian {
        let mut v = PeriodicField::zeros(lat, Rank::Scalar);
        v.set(0, &[1], C64::new(1.0, 0.0)).unwrap();
        v.set(0, &[-1], C64::new(1.0, 0.0)).unwrap();
        MagneticHamiltonian::new(lat, None, Some(v.into_real().unwrap())).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = brillouin_grid(2, 3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], vec![-PI, -PI]);
        assert_eq!(g[4], vec![0.0, 0.0]);
        assert_eq!(g[5], vec![0.0, PI]);
    }

    #[test]
    fn free_bands_d1() {
        let lat = Lattice::new(1, 6).unwrap();
        let h = MagneticHamiltonian::free(&lat);
        let t = compute_bands(&h, &[vec![0.0], vec![PI]], 3).unwrap();
        assert!(t.bands[0][0].abs() < 1e-12);
        let pi2 = PI * PI;
        assert!((t.bands[1][0] - pi2).abs() < 1e-10 * pi2);
        assert!((t.bands[1][1] - pi2).abs() < 1e-10 * pi2);
    }

    #[test]
    fn mathieu_gap_matches_degenerate_perturbation() {
        let lat = Lattice::new(1, 16).unwrap();
        let t = compute_bands(&mathieu(&lat), &[vec![PI]], 2).unwrap();
        let gap = t.bands[0][1] - t.bands[0][0];
        assert!((gap - 2.0).abs() <= 0.15 * 2.0, "gap {gap}");
    }

    #[test]
    fn mathieu_bands_are_even_in_k() {
        let lat = Lattice::new(1, 12).unwrap();
        let h = mathieu(&lat);
        let ks: Vec<Vec<f64>> = [0.3, 1.1, 2.9].iter().flat_map(|&k| [vec![k], vec![-k]]).collect();
        let t = compute_bands(&h, &ks, 4).unwrap();
        for pair in t.bands.chunks(2) {
            for (a, b) in pair[0].iter().zip(&pair[1]) {
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn refining_the_grid_shrinks_jumps() {
        let lat = Lattice::new(1, 8).unwrap();
        let h = mathieu(&lat);
        let jump = |p: usize| {
            let t = compute_bands(&h, &brillouin_grid(1, p), 3).unwrap();
            (0..3)
                .map(|n| {
                    let b: Vec<f64> = t.band(n).collect();
                    b.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (jump(9), jump(33));
        assert!(fine < coarse);
    }

    #[test]
    fn free_bands_not_flat_and_synthetic_constant_flagged() {
        let lat = Lattice::new(1, 6).unwrap();
        let t = compute_bands(&MagneticHamiltonian::free(&lat), &brillouin_grid(1, 17), 4).unwrap();
        let r = detect_flat_bands(&t, FlatTolerance::Absolute(1e-3)).unwrap();
        assert!(r.flagged.is_empty());

        let mut synthetic = t.clone();
        synthetic.bands.iter_mut().for_each(|row| row[2] = 7.0);
        let r = detect_flat_bands(&synthetic, FlatTolerance::Relative(1e-3)).unwrap();
        assert_eq!(r.flagged, vec![2]);
        assert_eq!(r.thresholds[2], 7e-3);
    }

    #[test]
    fn complex_potential_with_real_k_fails_integrity() {
        let lat = Lattice::new(1, 4).unwrap();
        let v = PeriodicField::single_mode(&lat, &[1], C64::new(1.0, 0.0)).unwrap();
        let h = MagneticHamiltonian::new(&lat, None, Some(v)).unwrap();
        assert!(matches!(compute_bands(&h, &[vec![0.0]], 1), Err(Error::Integrity(_))));
    }

    #[test]
    fn band_count_is_validated() {
        let lat = Lattice::new(1, 2).unwrap();
        let h = MagneticHamiltonian::free(&lat);
        assert!(compute_bands(&h, &[vec![0.0]], 0).is_err());
        assert!(compute_bands(&h, &[vec![0.0]], 6).is_err());
    }

    #[test]
    fn csv_layout() {
        let lat = Lattice::new(1, 2).unwrap();
        let t = compute_bands(&MagneticHamiltonian::free(&lat), &[vec![0.0]], 2).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k1,n,lambda");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("0.0000000000000000e0,1,"));
    }
}
