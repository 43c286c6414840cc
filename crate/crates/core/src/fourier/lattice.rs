use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Environment variable holding the memory budget in MiB.
pub const MEMORY_BUDGET_ENV: &str = "TORUS_SPECTRAL_MEM_MB";
const DEFAULT_BUDGET_MIB: u128 = 2048;

/// Upper bound on bytes that a single lattice-sized allocation may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    bytes: u128,
}

impl MemoryBudget {
    pub fn from_mib(mib: u128) -> Self {
        Self { bytes: mib << 20 }
    }

    /// Reads [`MEMORY_BUDGET_ENV`], falling back to 2 GiB.
    pub fn from_env() -> Self {
        let mib = std::env::var(MEMORY_BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .unwrap_or(DEFAULT_BUDGET_MIB);
        Self::from_mib(mib)
    }

    pub fn bytes(&self) -> u128 {
        self.bytes
    }

    /// A lattice is admissible when a complex quadrature grid of `(4N+2)^d`
    /// points fits; that is the largest per-field buffer the crate allocates.
    fn check_lattice(&self, d: usize, n: usize) -> Result<()> {
        let side = 4 * n as u128 + 2;
        let required = side
            .checked_pow(d as u32)
            .and_then(|p| p.checked_mul(16))
            .unwrap_or(u128::MAX);
        if required > self.bytes {
            return Err(Error::Budget {
                d,
                n,
                required,
                budget: self.bytes,
            });
        }
        Ok(())
    }

    /// Dense complex matrix over the lattice modes.
    pub fn check_dense_matrix(&self, lattice: &Lattice) -> Result<()> {
        let m = lattice.len() as u128;
        let required = m.saturating_mul(m).saturating_mul(16);
        if required > self.bytes {
            return Err(Error::Budget {
                d: lattice.dim(),
                n: lattice.cutoff(),
                required,
                budget: self.bytes,
            });
        }
        Ok(())
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::from_env()
    }
}

/// The box `{m ∈ Z^d : max_i |m_i| ≤ N}` of Fourier modes, ordered
/// lexicographically with the first coordinate most significant.
#[derive(Clone)]
pub struct Lattice {
    d: usize,
    n: usize,
    modes: Arc<[i64]>,
}

impl Lattice {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        Self::with_budget(d, n, &MemoryBudget::from_env())
    }

    pub fn with_budget(d: usize, n: usize, budget: &MemoryBudget) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("lattice dimension must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Domain("lattice cutoff must be at least 1".into()));
        }
        budget.check_lattice(d, n)?;
        Ok(Self::new_unchecked(d, n))
    }

    /// Builds the box without a budget check; `d` and `n` must be positive.
    pub(crate) fn new_unchecked(d: usize, n: usize) -> Self {
        let side = 2 * n + 1;
        let len = side.pow(d as u32);
        let mut modes = Vec::with_capacity(len * d);
        let mut m = vec![-(n as i64); d];
        for _ in 0..len {
            modes.extend_from_slice(&m);
            for axis in (0..d).rev() {
                if m[axis] < n as i64 {
                    m[axis] += 1;
                    break;
                }
                m[axis] = -(n as i64);
            }
        }
        Self {
            d,
            n,
            modes: modes.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.n
    }

    /// Points per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    pub fn len(&self) -> usize {
        self.modes.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mode(&self, index: usize) -> &[i64] {
        &self.modes[index * self.d..(index + 1) * self.d]
    }

    pub fn modes(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.modes.chunks_exact(self.d)
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.len() == self.d && m.iter().all(|&c| c.unsigned_abs() as usize <= self.n)
    }

    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        if !self.contains(m) {
            return None;
        }
        let side = self.side() as i64;
        let mut idx = 0i64;
        for &c in m {
            idx = idx * side + c + self.n as i64;
        }
        Some(idx as usize)
    }

    /// Index of the zero mode.
    pub fn origin(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Index of `-m` for the mode at `index`.
    pub fn negated(&self, index: usize) -> usize {
        self.len() - 1 - index
    }

    pub fn norm_sq(&self, index: usize) -> f64 {
        self.mode(index).iter().map(|&c| (c * c) as f64).sum()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n
    }
}

impl Eq for Lattice {}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("d", &self.d)
            .field("n", &self.n)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_counts() {
        assert_eq!(Lattice::new(2, 1).unwrap().len(), 9);
        assert_eq!(Lattice::new(1, 3).unwrap().len(), 7);
        assert_eq!(Lattice::new(3, 2).unwrap().len(), 125);
    }

    #[test]
    fn d2_n1_is_the_unit_box() {
        let lat = Lattice::new(2, 1).unwrap();
        let modes: Vec<Vec<i64>> = lat.modes().map(|m| m.to_vec()).collect();
        assert_eq!(modes[0], vec![-1, -1]);
        assert_eq!(modes[1], vec![-1, 0]);
        assert_eq!(modes[4], vec![0, 0]);
        assert_eq!(modes[8], vec![1, 1]);
        assert_eq!(lat.origin(), 4);
    }

    #[test]
    fn index_inverts_mode() {
        let lat = Lattice::new(3, 2).unwrap();
        for i in 0..lat.len() {
            assert_eq!(lat.index_of(lat.mode(i)), Some(i));
            let neg: Vec<i64> = lat.mode(i).iter().map(|c| -c).collect();
            assert_eq!(lat.index_of(&neg), Some(lat.negated(i)));
        }
        assert_eq!(lat.index_of(&[3, 0, 0]), None);
        assert_eq!(lat.index_of(&[0, 0]), None);
    }

    #[test]
    fn ordering_is_reproducible() {
        let a = Lattice::new(2, 4).unwrap();
        let b = Lattice::new(2, 4).unwrap();
        assert!(a.modes().zip(b.modes()).all(|(x, y)| x == y));
    }

    #[test]
    fn budget_rejects_large_lattices() {
        let tiny = MemoryBudget::from_mib(1);
        match Lattice::with_budget(3, 40, &tiny) {
            Err(Error::Budget { d, n, .. }) => assert_eq!((d, n), (3, 40)),
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(Lattice::with_budget(1, 4, &tiny).is_ok());
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(matches!(Lattice::new(0, 3), Err(Error::Domain(_))));
        assert!(matches!(Lattice::new(2, 0), Err(Error::Domain(_))));
    }
}
