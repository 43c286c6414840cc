use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fourier::{PeriodicField, Rank};
use crate::{Error, Result, C64};

/// Smallest `|m|` among the potential's nonzero frequencies that project to
/// the obstructed plane frequency, or `Unobstructed` when none does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum TailIndex {
    Finite(f64),
    Unobstructed,
}

impl TailIndex {
    pub fn as_f64(&self) -> f64 {
        match *self {
            TailIndex::Finite(t) => t,
            TailIndex::Unobstructed => f64::INFINITY,
        }
    }
}

/// A rational plane spanned by integer vectors `l`, `n`.
///
/// Restricting `e^{2πi m·x}` to `x = s·l + t·n` gives the plane frequency
/// `(m·l, m·n)`; the frequencies that land on `(0, 0)` are the ones the
/// plane gauge cannot remove.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneChoice {
    pub l: Vec<i64>,
    pub n: Vec<i64>,
    pub tail_index: TailIndex,
    pub search_bound: i64,
}

fn independent(l: &[i64], n: &[i64]) -> bool {
    (0..l.len()).any(|i| (i + 1..l.len()).any(|j| l[i] * n[j] != l[j] * n[i]))
}

fn integer_vectors(d: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-bound..=bound).map(move |x| {
                    let mut v = p.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

fn tail_index(support: &[(Vec<i64>, f64)], l: &[i64], n: &[i64]) -> TailIndex {
    let dot = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>();
    support
        .iter()
        .filter(|(m, _)| dot(m, l) == 0 && dot(m, n) == 0)
        .map(|(_, r)| *r)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
        .map_or(TailIndex::Unobstructed, TailIndex::Finite)
}

/// Larger tail index first, then smaller `|l|² + |n|²`, then lexicographic.
fn better(a: &PlaneChoice, b: &PlaneChoice) -> Ordering {
    let size = |p: &PlaneChoice| p.l.iter().chain(&p.n).map(|x| x * x).sum::<i64>();
    b.tail_index
        .as_f64()
        .partial_cmp(&a.tail_index.as_f64())
        .unwrap_or(Ordering::Equal)
        .then_with(|| size(a).cmp(&size(b)))
        .then_with(|| a.l.cmp(&b.l))
        .then_with(|| a.n.cmp(&b.n))
}

/// Exhaustive search over independent integer pairs with entries in
/// `[−L, L]` for the plane that pushes the obstructed frequencies of `A`
/// furthest out.
pub fn select_plane(a: &PeriodicField, bound: i64) -> Result<PlaneChoice> {
    let lat = a.lattice();
    let d = lat.dim();
    if d < 2 {
        return Err(Error::Precondition("plane selection needs d ≥ 2".into()));
    }
    if bound < 1 {
        return Err(Error::Precondition(format!("search bound must be ≥ 1, got {bound}")));
    }
    if a.rank() != Rank::Vector {
        return Err(Error::Shape(format!("plane selection needs a vector potential, got {:?}", a.rank())));
    }
    let zero = C64::new(0.0, 0.0);
    let support: Vec<(Vec<i64>, f64)> = lat
        .modes()
        .enumerate()
        .filter(|(i, m)| m.iter().any(|&c| c != 0) && (0..d).any(|c| a.component(c)[*i] != zero))
        .map(|(i, m)| (m.to_vec(), lat.norm_sq(i).sqrt()))
        .collect();
    let candidates = integer_vectors(d, bound);
    candidates
        .par_iter()
        .flat_map_iter(|l| {
            let support = &support;
            candidates.iter().filter(move |n| independent(l, n)).map(move |n| PlaneChoice {
                l: l.clone(),
                n: n.clone(),
                tail_index: tail_index(support, l, n),
                search_bound: bound,
            })
        })
        .min_by(better)
        .ok_or_else(|| Error::Precondition("no independent integer pair within the bound".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;

    fn vector_with_modes(lat: &Lattice, modes: &[&[i64]]) -> PeriodicField {
        let mut a = PeriodicField::zeros(lat, Rank::Vector);
        for m in modes {
            a.set(0, m, C64::new(1.0, 0.0)).unwrap();
        }
        a
    }

    #[test]
    fn zero_potential_is_unobstructed() {
        let lat = Lattice::new(3, 2).unwrap();
        let p = select_plane(&PeriodicField::zeros(&lat, Rank::Vector), 1).unwrap();
        assert_eq!(p.tail_index, TailIndex::Unobstructed);
        assert_eq!(p.l, vec![-1, 0, 0]);
        assert_eq!(p.n, vec![0, -1, 0]);
    }

    #[test]
    fn axis_supported_potential() {
        let lat = Lattice::new(3, 2).unwrap();
        let a = vector_with_modes(&lat, &[&[1, 0, 0], &[-1, 0, 0], &[2, 0, 0], &[-2, 0, 0]]);
        let s = vec![(vec![1i64, 0, 0], 1.0), (vec![-1, 0, 0], 1.0), (vec![2, 0, 0], 2.0), (vec![-2, 0, 0], 2.0)];
        assert_eq!(tail_index(&s, &[0, 1, 0], &[0, 0, 1]), TailIndex::Finite(1.0));
        let best = select_plane(&a, 1).unwrap();
        assert_eq!(best.tail_index, TailIndex::Unobstructed);
        assert!(best.l[0] != 0 || best.n[0] != 0);
    }

    #[test]
    fn single_mode_is_avoided() {
        let lat = Lattice::new(2, 3).unwrap();
        let q = [2i64, -1];
        let a = vector_with_modes(&lat, &[&q, &[-2, 1]]);
        let p = select_plane(&a, 2).unwrap();
        assert_eq!(p.tail_index, TailIndex::Unobstructed);
        let dl = q[0] * p.l[0] + q[1] * p.l[1];
        let dn = q[0] * p.n[0] + q[1] * p.n[1];
        assert!(dl != 0 || dn != 0);
    }

    #[test]
    fn dependent_pairs_excluded() {
        assert!(!independent(&[1, 2, 0], &[2, 4, 0]));
        assert!(independent(&[1, 2, 0], &[0, 0, 1]));
    }

    #[test]
    fn preconditions() {
        let lat = Lattice::new(1, 2).unwrap();
        assert!(select_plane(&PeriodicField::zeros(&lat, Rank::Vector), 1).is_err());
        let lat = Lattice::new(2, 2).unwrap();
        assert!(select_plane(&PeriodicField::zeros(&lat, Rank::Vector), 0).is_err());
    }
}
