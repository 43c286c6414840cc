use serde::{Deserialize, Serialize};

use super::{Lattice, QuadratureGrid};
use crate::{Error, Result, C64};

/// Shape of the value a field takes at each point of the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rank {
    Scalar,
    /// A `d`-vector, `d` being the lattice dimension.
    Vector,
    /// A `q × q` matrix, stored row-major.
    Matrix(usize),
}

impl Rank {
    pub fn components(&self, d: usize) -> usize {
        match *self {
            Rank::Scalar => 1,
            Rank::Vector => d,
            Rank::Matrix(q) => q * q,
        }
    }
}

/// Truncated Fourier representation of a periodic function on `T^d`.
///
/// Coefficients are stored densely over the lattice box, component-major:
/// component `c` occupies `coeffs[c * M .. (c + 1) * M]` with `M` the number
/// of lattice modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    lattice: Lattice,
    rank: Rank,
    coeffs: Vec<C64>,
    real: bool,
    mean_zero: bool,
    smoothness: Option<f64>,
}

/// Result of [`PeriodicField::convolve`]: the in-lattice part of the product
/// and the `L₂` norm of the modes the truncation dropped.
#[derive(Debug, Clone)]
pub struct Product {
    pub field: PeriodicField,
    pub truncation_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub exponent: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaDirection {
    Forward,
    Inverse,
}

/// `(ρ² + |m|²)^{1/2}` with the Euclidean norm of the mode.
pub fn lambda_weight(rho: f64, norm_sq: f64) -> f64 {
    (rho * rho + norm_sq).sqrt()
}

const SYMMETRY_TOL: f64 = 1e-12;

impl PeriodicField {
    pub fn zeros(lattice: &Lattice, rank: Rank) -> Self {
        let len = lattice.len() * rank.components(lattice.dim());
        Self {
            lattice: lattice.clone(),
            rank,
            coeffs: vec![C64::new(0.0, 0.0); len],
            real: false,
            mean_zero: false,
            smoothness: None,
        }
    }

    pub fn from_coefficients(lattice: &Lattice, rank: Rank, coeffs: Vec<C64>) -> Result<Self> {
        let expected = lattice.len() * rank.components(lattice.dim());
        if coeffs.len() != expected {
            return Err(Error::Shape(format!(
                "{rank:?} field on (d={}, N={}) needs {expected} coefficients, got {}",
                lattice.dim(),
                lattice.cutoff(),
                coeffs.len()
            )));
        }
        Ok(Self {
            coeffs,
            ..Self::zeros(lattice, rank)
        })
    }

    pub fn constant(lattice: &Lattice, value: C64) -> Self {
        let mut f = Self::zeros(lattice, Rank::Scalar);
        f.coeffs[lattice.origin()] = value;
        f
    }

    /// Scalar field with a single nonzero coefficient.
    pub fn single_mode(lattice: &Lattice, m: &[i64], value: C64) -> Result<Self> {
        let mut f = Self::zeros(lattice, Rank::Scalar);
        f.set(0, m, value)?;
        Ok(f)
    }

    /// Stacks scalar fields into a vector (`d` parts) or matrix (`q²` parts,
    /// row-major) field.
    pub fn stack(rank: Rank, parts: &[PeriodicField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("cannot stack zero components".into()))?;
        let lattice = first.lattice.clone();
        if parts.len() != rank.components(lattice.dim()) {
            return Err(Error::Shape(format!(
                "{rank:?} needs {} components, got {}",
                rank.components(lattice.dim()),
                parts.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(parts.len() * lattice.len());
        for p in parts {
            if p.lattice != lattice || p.rank != Rank::Scalar {
                return Err(Error::Shape("stacked components must be scalar fields on one lattice".into()));
            }
            coeffs.extend_from_slice(&p.coeffs);
        }
        let mut f = Self::from_coefficients(&lattice, rank, coeffs)?;
        f.real = parts.iter().all(|p| p.real);
        Ok(f)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn components(&self) -> usize {
        self.rank.components(self.lattice.dim())
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    pub fn with_smoothness(mut self, s: Option<f64>) -> Self {
        self.smoothness = s;
        self
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[C64] {
        let m = self.lattice.len();
        &self.coeffs[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C64] {
        let m = self.lattice.len();
        self.real = false;
        self.mean_zero = false;
        &mut self.coeffs[c * m..(c + 1) * m]
    }

    /// Scalar field holding component `c`.
    pub fn component_field(&self, c: usize) -> PeriodicField {
        let mut f = Self::zeros(&self.lattice, Rank::Scalar);
        f.coeffs.copy_from_slice(self.component(c));
        f.real = self.real;
        f
    }

    pub fn get(&self, c: usize, m: &[i64]) -> C64 {
        self.lattice
            .index_of(m)
            .map(|i| self.component(c)[i])
            .unwrap_or_default()
    }

    /// Sets one coefficient; clears the real and mean-zero flags.
    pub fn set(&mut self, c: usize, m: &[i64], value: C64) -> Result<()> {
        let i = self.lattice.index_of(m).ok_or_else(|| {
            Error::Shape(format!("mode {m:?} is outside the lattice (N={})", self.lattice.cutoff()))
        })?;
        if c >= self.components() {
            return Err(Error::Shape(format!("component {c} out of range for {:?}", self.rank)));
        }
        self.component_mut(c)[i] = value;
        Ok(())
    }

    /// Mean of each component (the zero-mode coefficients).
    pub fn mean(&self) -> Vec<C64> {
        let o = self.lattice.origin();
        (0..self.components()).map(|c| self.component(c)[o]).collect()
    }

    /// Maximum of `|ĉ(-m) - conj ĉ(m)|` over modes and components.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.components() {
            let comp = self.component(c);
            for i in 0..comp.len() {
                let j = self.lattice.negated(i);
                worst = worst.max((comp[j] - comp[i].conj()).norm());
            }
        }
        worst
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Flags the field as the transform of a real-valued function after
    /// checking conjugate symmetry.
    pub fn into_real(mut self) -> Result<Self> {
        let asym = self.conjugate_asymmetry();
        if asym > SYMMETRY_TOL * self.max_abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "field flagged real is not conjugate-symmetric (defect {asym:e})"
            )));
        }
        self.real = true;
        Ok(self)
    }

    /// Projects onto conjugate-symmetric coefficients and flags real.
    pub fn symmetrized(mut self) -> Self {
        let m = self.lattice.len();
        for c in 0..self.components() {
            let comp = &mut self.coeffs[c * m..(c + 1) * m];
            for i in 0..=m / 2 {
                let j = m - 1 - i;
                let avg = 0.5 * (comp[i] + comp[j].conj());
                comp[i] = avg;
                comp[j] = avg.conj();
            }
        }
        self.real = true;
        self
    }

    /// Flags the field mean-zero after checking every component's zero mode.
    pub fn into_mean_zero(mut self) -> Result<Self> {
        if self.mean().iter().any(|c| *c != C64::new(0.0, 0.0)) {
            return Err(Error::Precondition("field flagged mean-zero has a nonzero mean".into()));
        }
        self.mean_zero = true;
        Ok(self)
    }

    /// Drops the zero modes and flags mean-zero.
    pub fn without_mean(mut self) -> Self {
        let o = self.lattice.origin();
        let m = self.lattice.len();
        for c in 0..self.components() {
            self.coeffs[c * m + o] = C64::new(0.0, 0.0);
        }
        self.mean_zero = true;
        self
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice || self.rank != other.rank {
            return Err(Error::Shape(format!(
                "{:?} on {:?} vs {:?} on {:?}",
                self.rank, self.lattice, other.rank, other.lattice
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += b);
        out.real = self.real && other.real;
        out.mean_zero = self.mean_zero && other.mean_zero;
        out.smoothness = None;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= factor);
        out.real = self.real && factor.im == 0.0;
        out
    }

    /// Applies `f(mode, coefficient)` to every coefficient of every component.
    pub fn map_modes(&self, f: impl Fn(&[i64], C64) -> C64) -> Self {
        let mut out = self.clone();
        let m = self.lattice.len();
        for c in 0..self.components() {
            for (i, mode) in self.lattice.modes().enumerate() {
                out.coeffs[c * m + i] = f(mode, self.coeffs[c * m + i]);
            }
        }
        out.real = false;
        out.mean_zero = false;
        out.smoothness = None;
        out
    }

    /// `(Σ_m (1+|m|²)^s |û(m)|²)^{1/2}`, summed over components.
    pub fn sobolev_norm(&self, s: f64) -> SobolevReport {
        let weights: Vec<f64> = (0..self.lattice.len())
            .map(|i| (1.0 + self.lattice.norm_sq(i)).powf(s))
            .collect();
        let mut total = 0.0;
        for c in 0..self.components() {
            total += self
                .component(c)
                .iter()
                .zip(&weights)
                .map(|(u, w)| w * u.norm_sqr())
                .sum::<f64>();
        }
        SobolevReport {
            exponent: s,
            norm: total.sqrt(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0).norm
    }

    /// Multiplies (or divides) coefficient `m` by `(ρ² + |m|²)^{1/2}`.
    pub fn apply_lambda(&self, rho: f64, direction: LambdaDirection) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("Λ_ρ needs ρ > 0, got {rho}")));
        }
        let mut out = self.clone();
        let m = self.lattice.len();
        for i in 0..m {
            let w = lambda_weight(rho, self.lattice.norm_sq(i));
            for c in 0..self.components() {
                let v = &mut out.coeffs[c * m + i];
                *v = match direction {
                    LambdaDirection::Forward => *v * w,
                    LambdaDirection::Inverse => *v / w,
                };
            }
        }
        out.smoothness = None;
        Ok(out)
    }

    /// Fourier image of the pointwise product. Supported ranks:
    /// scalar·scalar, scalar·vector, vector·scalar, vector·vector (dot
    /// product, no conjugation), and matrix·matrix / scalar·matrix with equal
    /// sizes.
    pub fn convolve(&self, other: &Self) -> Result<Product> {
        if self.lattice != other.lattice {
            return Err(Error::Shape("convolution operands live on different lattices".into()));
        }
        let lat = &self.lattice;
        let d = lat.dim();
        let out_rank = match (self.rank, other.rank) {
            (Rank::Scalar, r) | (r, Rank::Scalar) => r,
            (Rank::Vector, Rank::Vector) => Rank::Scalar,
            (Rank::Matrix(p), Rank::Matrix(q)) if p == q => Rank::Matrix(p),
            (a, b) => return Err(Error::Shape(format!("cannot multiply {a:?} by {b:?}"))),
        };
        let grid = QuadratureGrid::for_products(lat);
        let left: Vec<Vec<C64>> = (0..self.components())
            .map(|c| grid.synthesize(lat, self.component(c)))
            .collect();
        let right: Vec<Vec<C64>> = (0..other.components())
            .map(|c| grid.synthesize(lat, other.component(c)))
            .collect();
        let npts = grid.len();
        let pointwise = |terms: &[(usize, usize)]| -> Vec<C64> {
            let mut acc = vec![C64::new(0.0, 0.0); npts];
            for &(a, b) in terms {
                for ((o, x), y) in acc.iter_mut().zip(&left[a]).zip(&right[b]) {
                    *o += x * y;
                }
            }
            acc
        };
        let products: Vec<Vec<C64>> = match (self.rank, other.rank) {
            (Rank::Scalar, Rank::Scalar) => vec![pointwise(&[(0, 0)])],
            (Rank::Scalar, _) => (0..other.components()).map(|c| pointwise(&[(0, c)])).collect(),
            (_, Rank::Scalar) => (0..self.components()).map(|c| pointwise(&[(c, 0)])).collect(),
            (Rank::Vector, Rank::Vector) => {
                let terms: Vec<(usize, usize)> = (0..d).map(|j| (j, j)).collect();
                vec![pointwise(&terms)]
            }
            (Rank::Matrix(q), Rank::Matrix(_)) => {
                let mut out = Vec::with_capacity(q * q);
                for i in 0..q {
                    for j in 0..q {
                        let terms: Vec<(usize, usize)> = (0..q).map(|l| (i * q + l, l * q + j)).collect();
                        out.push(pointwise(&terms));
                    }
                }
                out
            }
            _ => unreachable!("rank combination validated above"),
        };
        let mut coeffs = Vec::with_capacity(products.len() * lat.len());
        let mut loss_sq = 0.0;
        for values in products {
            let spec = grid.analyze(values);
            coeffs.extend(spec.restrict(lat));
            loss_sq += spec.norm_outside(lat, 2 * lat.cutoff()).powi(2);
        }
        let mut field = Self::from_coefficients(lat, out_rank, coeffs)?;
        if self.real && other.real {
            field = field.symmetrized();
        }
        Ok(Product {
            field,
            truncation_loss: loss_sq.sqrt(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn delta_times_delta() {
        let lat = Lattice::new(2, 2).unwrap();
        let u = PeriodicField::single_mode(&lat, &[1, 0], c(1.0, 0.0)).unwrap();
        let v = PeriodicField::single_mode(&lat, &[0, 1], c(1.0, 0.0)).unwrap();
        let w = u.convolve(&v).unwrap();
        for (i, m) in lat.modes().enumerate() {
            let expect = if m == [1, 1] { 1.0 } else { 0.0 };
            assert!((w.field.component(0)[i] - c(expect, 0.0)).norm() < 1e-14);
        }
        assert!(w.truncation_loss < 1e-14);
    }

    #[test]
    fn cosine_squared() {
        let lat = Lattice::new(1, 3).unwrap();
        let mut u = PeriodicField::zeros(&lat, Rank::Scalar);
        u.set(0, &[1], c(1.0, 0.0)).unwrap();
        u.set(0, &[-1], c(1.0, 0.0)).unwrap();
        let w = u.convolve(&u).unwrap().field;
        let expect = [(-2, 1.0), (0, 2.0), (2, 1.0)];
        for m in -3..=3i64 {
            let e = expect.iter().find(|(k, _)| *k == m).map(|(_, v)| *v).unwrap_or(0.0);
            assert!((w.get(0, &[m]) - c(e, 0.0)).norm() < 1e-14, "mode {m}");
        }
    }

    #[test]
    fn truncation_loss_is_reported() {
        let lat = Lattice::new(1, 2).unwrap();
        let u = PeriodicField::single_mode(&lat, &[2], c(1.0, 0.0)).unwrap();
        let w = u.convolve(&u).unwrap();
        assert!(w.field.l2_norm() < 1e-14);
        assert!((w.truncation_loss - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_one_is_identity() {
        let lat = Lattice::new(2, 3).unwrap();
        let one = PeriodicField::constant(&lat, c(1.0, 0.0));
        let coeffs = (0..lat.len()).map(|i| c(i as f64, -(i as f64) * 0.5)).collect();
        let u = PeriodicField::from_coefficients(&lat, Rank::Scalar, coeffs).unwrap();
        let w = one.convolve(&u).unwrap().field;
        for (a, b) in w.coefficients().iter().zip(u.coefficients()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_mismatch_is_a_shape_error() {
        let lat = Lattice::new(2, 1).unwrap();
        let v = PeriodicField::zeros(&lat, Rank::Vector);
        let m = PeriodicField::zeros(&lat, Rank::Matrix(2));
        assert!(matches!(v.convolve(&m), Err(Error::Shape(_))));
        let m3 = PeriodicField::zeros(&lat, Rank::Matrix(3));
        assert!(matches!(m.convolve(&m3), Err(Error::Shape(_))));
    }

    #[test]
    fn sobolev_examples() {
        let lat = Lattice::new(2, 2).unwrap();
        let u = PeriodicField::single_mode(&lat, &[1, 0], c(1.0, 0.0)).unwrap();
        assert!((u.sobolev_norm(1.0).norm - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(u.sobolev_norm(0.0).norm, 1.0);
        let z = PeriodicField::zeros(&lat, Rank::Scalar);
        assert_eq!(z.sobolev_norm(3.5).norm, 0.0);
    }

    #[test]
    fn lambda_examples() {
        let lat = Lattice::new(2, 4).unwrap();
        let u = PeriodicField::single_mode(&lat, &[4, 0], c(1.0, 0.0)).unwrap();
        let w = u.apply_lambda(3.0, LambdaDirection::Forward).unwrap();
        assert_eq!(w.get(0, &[4, 0]), c(5.0, 0.0));
        let o = PeriodicField::constant(&lat, c(1.0, 0.0));
        assert_eq!(o.apply_lambda(1.0, LambdaDirection::Forward).unwrap().get(0, &[0, 0]), c(1.0, 0.0));
        assert!(matches!(u.apply_lambda(0.0, LambdaDirection::Inverse), Err(Error::Domain(_))));
        assert!(matches!(u.apply_lambda(-1.0, LambdaDirection::Forward), Err(Error::Domain(_))));
    }

    #[test]
    fn real_flag_is_validated() {
        let lat = Lattice::new(1, 2).unwrap();
        let mut u = PeriodicField::zeros(&lat, Rank::Scalar);
        u.set(0, &[1], c(0.5, 0.25)).unwrap();
        assert!(u.clone().into_real().is_err());
        u.set(0, &[-1], c(0.5, -0.25)).unwrap();
        assert!(u.into_real().unwrap().is_real());
    }

    #[test]
    fn mean_zero_flag_is_validated() {
        let lat = Lattice::new(2, 1).unwrap();
        let u = PeriodicField::constant(&lat, c(0.1, 0.0));
        assert!(u.clone().into_mean_zero().is_err());
        assert!(u.without_mean().is_mean_zero());
    }

    #[test]
    fn matrix_product_is_pointwise_matrix_multiplication() {
        // Constant matrices: [[1,2],[3,4]] · [[0,1],[1,0]] = [[2,1],[4,3]].
        let lat = Lattice::new(2, 1).unwrap();
        let consts = |vals: [f64; 4]| {
            let parts: Vec<_> = vals.iter().map(|&v| PeriodicField::constant(&lat, c(v, 0.0))).collect();
            PeriodicField::stack(Rank::Matrix(2), &parts).unwrap()
        };
        let a = consts([1.0, 2.0, 3.0, 4.0]);
        let b = consts([0.0, 1.0, 1.0, 0.0]);
        let p = a.convolve(&b).unwrap().field;
        let means: Vec<f64> = p.mean().iter().map(|z| z.re).collect();
        for (x, y) in means.iter().zip([2.0, 1.0, 4.0, 3.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
