use std::f64::consts::PI;
use std::fmt::Write as _;

use faer::Mat;

use super::{symbol_h0, ComplexQuasimomentum};
use crate::fourier::{lambda_weight, Lattice, MemoryBudget, PeriodicField, Rank};
use crate::{Error, Result, C64};

/// Potentials `(A, V)` on a lattice together with the precomputed Fourier
/// coefficients of `A·A` on the doubled box, ready for assembly at any `k`.
#[derive(Debug, Clone)]
pub struct MagneticHamiltonian {
    lattice: Lattice,
    a: Option<PeriodicField>,
    v: Option<PeriodicField>,
    /// `(Â⋆Â)(δ)` for `δ` in the box of cutoff `2N`.
    a_sq: Option<Vec<C64>>,
    a_sq_loss: f64,
}

/// `H(k)` (or `H(k)Λ_ρ⁻¹`) as a dense matrix indexed by lattice modes.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    lattice: Lattice,
    matrix: Mat<C64>,
    k: Vec<C64>,
    preconditioned: Option<f64>,
    a_sq_loss: f64,
}

impl MagneticHamiltonian {
    pub fn new(lattice: &Lattice, a: Option<PeriodicField>, v: Option<PeriodicField>) -> Result<Self> {
        if let Some(a) = &a {
            if a.lattice() != lattice || a.rank() != Rank::Vector {
                return Err(Error::Shape(format!(
                    "A must be a vector field on {lattice:?}, got {:?} on {:?}",
                    a.rank(),
                    a.lattice()
                )));
            }
        }
        if let Some(v) = &v {
            if v.lattice() != lattice || v.rank() != Rank::Scalar {
                return Err(Error::Shape(format!(
                    "V must be a scalar field on {lattice:?}, got {:?} on {:?}",
                    v.rank(),
                    v.lattice()
                )));
            }
        }
        let (a_sq, a_sq_loss) = match &a {
            Some(a) => {
                let (sq, loss) = direct_square(a);
                (Some(sq), loss)
            }
            None => (None, 0.0),
        };
        Ok(Self {
            lattice: lattice.clone(),
            a,
            v,
            a_sq,
            a_sq_loss,
        })
    }

    pub fn free(lattice: &Lattice) -> Self {
        Self {
            lattice: lattice.clone(),
            a: None,
            v: None,
            a_sq: None,
            a_sq_loss: 0.0,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn magnetic(&self) -> Option<&PeriodicField> {
        self.a.as_ref()
    }

    pub fn electric(&self) -> Option<&PeriodicField> {
        self.v.as_ref()
    }

    /// `L₂` mass of `A·A` outside the lattice box.
    pub fn square_truncation_loss(&self) -> f64 {
        self.a_sq_loss
    }

    /// True when both potentials are flagged real (or absent).
    pub fn is_real(&self) -> bool {
        self.a.as_ref().is_none_or(|a| a.is_real()) && self.v.as_ref().is_none_or(|v| v.is_real())
    }

    /// Same potentials with `A` replaced by `A + ∇χ`.
    pub fn gauge_shifted(&self, chi: &PeriodicField) -> Result<Self> {
        let a = match &self.a {
            Some(a) => a.clone(),
            None => PeriodicField::zeros(&self.lattice, Rank::Vector).into_real()?,
        };
        Self::new(&self.lattice, Some(gauge_shift(&a, chi)?), self.v.clone())
    }

    pub fn assemble(&self, k: &ComplexQuasimomentum, precondition: bool) -> Result<AssembledOperator> {
        if k.dim() != self.lattice.dim() {
            return Err(Error::Shape(format!(
                "quasimomentum has dimension {}, lattice {}",
                k.dim(),
                self.lattice.dim()
            )));
        }
        let rho = if precondition {
            if k.rho() <= 0.0 {
                return Err(Error::Domain("Λ_ρ preconditioning needs ρ > 0".into()));
            }
            Some(k.rho())
        } else {
            None
        };
        self.assemble_at(&k.value(), rho)
    }

    /// Assembly at an arbitrary complex `k`, optionally right-multiplied by
    /// `Λ_ρ⁻¹`.
    pub fn assemble_at(&self, k: &[C64], lambda_rho: Option<f64>) -> Result<AssembledOperator> {
        let lat = &self.lattice;
        let d = lat.dim();
        if k.len() != d {
            return Err(Error::Shape(format!("k has dimension {}, lattice {d}", k.len())));
        }
        if let Some(rho) = lambda_rho {
            if !(rho > 0.0) {
                return Err(Error::Domain(format!("Λ_ρ needs ρ > 0, got {rho}")));
            }
        }
        MemoryBudget::from_env().check_dense_matrix(lat)?;

        let m = lat.len();
        let n = lat.cutoff() as i64;
        let ext_side = 4 * n + 1;
        let ext_index = |delta: &[i64]| -> usize {
            delta.iter().fold(0i64, |acc, &c| acc * ext_side + c + 2 * n) as usize
        };
        let mut matrix = Mat::<C64>::zeros(m, m);
        let mut delta = vec![0i64; d];
        for i in 0..m {
            let mi = lat.mode(i);
            matrix[(i, i)] = symbol_h0(k, mi);
            for j in 0..m {
                let mj = lat.mode(j);
                for ((dl, a), b) in delta.iter_mut().zip(mi).zip(mj) {
                    *dl = a - b;
                }
                let mut entry = C64::new(0.0, 0.0);
                if let Some(a) = &self.a {
                    if let Some(idx) = lat.index_of(&delta) {
                        for axis in 0..d {
                            let weight = k[axis] * 2.0 + 2.0 * PI * (mi[axis] + mj[axis]) as f64;
                            entry += weight * a.component(axis)[idx];
                        }
                    }
                }
                if let Some(sq) = &self.a_sq {
                    entry += sq[ext_index(&delta)];
                }
                if let Some(v) = &self.v {
                    if let Some(idx) = lat.index_of(&delta) {
                        entry += v.component(0)[idx];
                    }
                }
                if entry != C64::new(0.0, 0.0) {
                    matrix[(i, j)] += entry;
                }
            }
        }
        if let Some(rho) = lambda_rho {
            for j in 0..m {
                let w = lambda_weight(rho, lat.norm_sq(j));
                for i in 0..m {
                    matrix[(i, j)] /= w;
                }
            }
        }
        Ok(AssembledOperator {
            lattice: lat.clone(),
            matrix,
            k: k.to_vec(),
            preconditioned: lambda_rho,
            a_sq_loss: self.a_sq_loss,
        })
    }
}

/// `(Â⋆Â)(δ) = Σ_j Σ_p Â_j(p) Â_j(δ − p)` on the box of cutoff `2N` by
/// direct summation, plus the `ℓ²` mass outside the lattice box.
fn direct_square(a: &PeriodicField) -> (Vec<C64>, f64) {
    let lat = a.lattice();
    let d = lat.dim();
    let n = lat.cutoff() as i64;
    let side = 4 * n + 1;
    let mut sq = vec![C64::new(0.0, 0.0); (side as usize).pow(d as u32)];
    for c in 0..d {
        let comp = a.component(c);
        let support: Vec<usize> = (0..lat.len()).filter(|&i| comp[i] != C64::new(0.0, 0.0)).collect();
        for &p in &support {
            for &q in &support {
                let idx = lat
                    .mode(p)
                    .iter()
                    .zip(lat.mode(q))
                    .fold(0i64, |acc, (x, y)| acc * side + x + y + 2 * n);
                sq[idx as usize] += comp[p] * comp[q];
            }
        }
    }
    let ext = Lattice::new_unchecked(d, 2 * n as usize);
    let loss = ext
        .modes()
        .zip(&sq)
        .filter(|(m, _)| !lat.contains(m))
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    (sq, loss)
}

/// `A + ∇χ` with `(∇χ)̂_j(m) = 2πi m_j χ̂(m)`.
pub fn gauge_shift(a: &PeriodicField, chi: &PeriodicField) -> Result<PeriodicField> {
    if a.rank() != Rank::Vector || chi.rank() != Rank::Scalar || a.lattice() != chi.lattice() {
        return Err(Error::Shape("gauge shift needs a vector A and scalar χ on one lattice".into()));
    }
    if !chi.is_real() {
        return Err(Error::Precondition("gauge function χ must be flagged real".into()));
    }
    let lat = a.lattice();
    let mut out = a.clone();
    for axis in 0..lat.dim() {
        let grad: Vec<C64> = lat
            .modes()
            .zip(chi.component(0))
            .map(|(m, c)| C64::new(0.0, 2.0 * PI * m[axis] as f64) * c)
            .collect();
        out.component_mut(axis).iter_mut().zip(grad).for_each(|(x, g)| *x += g);
    }
    if a.is_real() {
        out = out.into_real()?;
    }
    Ok(out)
}

impl AssembledOperator {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn k(&self) -> &[C64] {
        &self.k
    }

    /// `Some(ρ)` when the matrix is `H(k)Λ_ρ⁻¹`.
    pub fn preconditioned(&self) -> Option<f64> {
        self.preconditioned
    }

    pub fn square_truncation_loss(&self) -> f64 {
        self.a_sq_loss
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let m = self.dim();
        assert_eq!(x.len(), m, "vector length must match operator dimension");
        let mut y = vec![C64::new(0.0, 0.0); m];
        for j in 0..m {
            let xj = x[j];
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += self.matrix[(i, j)] * xj;
            }
        }
        y
    }

    /// `max_{ij} |H_ij − conj(H_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i..m {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                worst = worst.max(self.matrix[(i, j)].norm());
            }
        }
        worst
    }

    /// Largest `max_i |m_i − n_i|` over nonzero off-diagonal entries.
    pub fn bandwidth(&self) -> usize {
        let lat = &self.lattice;
        let mut band = 0i64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if i != j && self.matrix[(i, j)] != C64::new(0.0, 0.0) {
                    let dist = lat.mode(i).iter().zip(lat.mode(j)).map(|(a, b)| (a - b).abs()).max().unwrap_or(0);
                    band = band.max(dist);
                }
            }
        }
        band as usize
    }

    /// Coordinate-list dump: a `#` header naming `(d, N, k, flags)` followed
    /// by `i j re im` per nonzero entry, floats with 17 significant digits.
    pub fn to_coordinate_dump(&self) -> String {
        let mut out = format!("# operator d={} n={} k=", self.lattice.dim(), self.lattice.cutoff());
        for (i, z) in self.k.iter().enumerate() {
            let sep = if i == 0 { "" } else { ";" };
            let _ = write!(out, "{sep}{:.16e},{:.16e}", z.re, z.im);
        }
        match self.preconditioned {
            Some(rho) => {
                let _ = writeln!(out, " preconditioned=true rho={rho:.16e}");
            }
            None => out.push_str(" preconditioned=false\n"),
        }
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                let z = self.matrix[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    let _ = writeln!(out, "{i} {j} {:.16e} {:.16e}", z.re, z.im);
                }
            }
        }
        out
    }
}
