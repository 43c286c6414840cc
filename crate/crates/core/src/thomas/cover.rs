use serde::{Deserialize, Serialize};

use super::ZeroSetSlab;
use crate::fourier::Lattice;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchClass {
    Far,
    Near,
}

impl PatchClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatchClass::Far => "far",
            PatchClass::Near => "near",
        }
    }
}

/// One tile of the cover. `psi` lists the lattice indices of the tile,
/// `phi` those of the tile fattened on every side; both ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub center: Vec<i64>,
    pub class: PatchClass,
    pub psi: Vec<usize>,
    pub phi: Vec<usize>,
}

/// Axis-aligned tiling of the lattice box into boxes of side `⌊ρ^δ⌋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCover {
    pub rho: f64,
    pub delta: f64,
    pub tile_side: usize,
    pub fattening: usize,
    pub lattice_len: usize,
    pub patches: Vec<Patch>,
}

impl DualCover {
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn psi_indicator(&self, j: usize) -> Vec<u8> {
        indicator(self.lattice_len, &self.patches[j].psi)
    }

    pub fn phi_indicator(&self, j: usize) -> Vec<u8> {
        indicator(self.lattice_len, &self.patches[j].phi)
    }

    /// Largest number of `φ_j` containing a single mode.
    pub fn phi_multiplicity(&self) -> usize {
        let mut count = vec![0usize; self.lattice_len];
        for p in &self.patches {
            for &i in &p.phi {
                count[i] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    pub fn near_count(&self) -> usize {
        self.patches.iter().filter(|p| p.class == PatchClass::Near).count()
    }
}

fn indicator(len: usize, members: &[usize]) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for &i in members {
        out[i] = 1;
    }
    out
}

/// Tiles of side `s = max(1, ⌊ρ^δ⌋)` (the last tile on each axis may be
/// shorter), `φ_j` fattened by `⌊s/2⌋` on each side. A tile is near when its
/// Euclidean distance to the near set of `slab` is at most `ρ^δ`.
pub fn build_cover(rho: f64, delta: f64, lattice: &Lattice, slab: &ZeroSetSlab) -> Result<DualCover> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("δ must lie in (0, 1), got {delta}")));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("ρ must be positive, got {rho}")));
    }
    let radius = rho.powf(delta);
    let side = (radius.floor() as usize).max(1);
    let fat = side / 2;
    let d = lattice.dim();
    let n = lattice.cutoff() as i64;
    let starts: Vec<i64> = (-n..=n).step_by(side).collect();

    let mut patches = Vec::new();
    let mut corner = vec![0usize; d];
    loop {
        let lo: Vec<i64> = corner.iter().map(|&c| starts[c]).collect();
        let hi: Vec<i64> = lo.iter().map(|&l| (l + side as i64 - 1).min(n)).collect();
        let center: Vec<i64> = lo.iter().zip(&hi).map(|(l, h)| (l + h).div_euclid(2)).collect();
        let near = slab.near.iter().any(|m| box_distance_sq(&lo, &hi, m) <= radius * radius);
        let in_box = |m: &[i64], pad: i64| m.iter().zip(&lo).zip(&hi).all(|((x, l), h)| *x >= l - pad && *x <= h + pad);
        let psi: Vec<usize> = (0..lattice.len()).filter(|&i| in_box(lattice.mode(i), 0)).collect();
        let phi: Vec<usize> = (0..lattice.len())
            .filter(|&i| in_box(lattice.mode(i), fat as i64))
            .collect();
        patches.push(Patch {
            lo,
            hi,
            center,
            class: if near { PatchClass::Near } else { PatchClass::Far },
            psi,
            phi,
        });
        // odometer over tile corners, last axis fastest
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(DualCover {
                    rho,
                    delta,
                    tile_side: side,
                    fattening: fat,
                    lattice_len: lattice.len(),
                    patches,
                });
            }
            axis -= 1;
            corner[axis] += 1;
            if corner[axis] < starts.len() {
                break;
            }
            corner[axis] = 0;
        }
    }
}

fn box_distance_sq(lo: &[i64], hi: &[i64], m: &[i64]) -> f64 {
    lo.iter()
        .zip(hi)
        .zip(m)
        .map(|((&l, &h), &x)| {
            let gap = if x < l { l - x } else if x > h { x - h } else { 0 };
            (gap * gap) as f64
        })
        .sum()
}
