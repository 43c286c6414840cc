use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::Lattice;
use crate::C64;

/// Uniform tensor grid `x_j = j / p` on `T^d` with FFT-based synthesis and
/// analysis of trigonometric polynomials.
#[derive(Clone)]
pub struct QuadratureGrid {
    d: usize,
    p: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for QuadratureGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadratureGrid")
            .field("d", &self.d)
            .field("p", &self.p)
            .finish()
    }
}

/// Smallest integer `≥ n` whose only prime factors are 2, 3 and 5.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for f in [2, 3, 5] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

impl QuadratureGrid {
    pub fn new(d: usize, p: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            d,
            p,
            forward: planner.plan_fft_forward(p),
            inverse: planner.plan_fft_inverse(p),
        }
    }

    /// Grid on which products of two fields of `lattice` are alias-free for
    /// all modes up to `2N`.
    pub fn for_products(lattice: &Lattice) -> Self {
        Self::new(lattice.dim(), smooth_size(4 * lattice.cutoff() + 1))
    }

    /// Grid with at least `points_per_axis` points per axis.
    pub fn with_min_points(d: usize, points_per_axis: usize) -> Self {
        Self::new(d, smooth_size(points_per_axis))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.p.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn slot(&self, m: &[i64]) -> usize {
        let p = self.p as i64;
        m.iter().fold(0usize, |acc, &c| acc * self.p + c.rem_euclid(p) as usize)
    }

    /// Coordinates of grid point `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        let mut r = index;
        for axis in (0..self.d).rev() {
            x[axis] = (r % self.p) as f64 / self.p as f64;
            r /= self.p;
        }
        x
    }

    /// Values `u(x_j) = Σ_m c_m e^{2πi m·x_j}` of the trigonometric polynomial
    /// with coefficients `coeffs` over `lattice`.
    pub fn synthesize(&self, lattice: &Lattice, coeffs: &[C64]) -> Vec<C64> {
        debug_assert_eq!(lattice.dim(), self.d);
        let mut buf = vec![C64::new(0.0, 0.0); self.len()];
        for (m, &c) in lattice.modes().zip(coeffs) {
            buf[self.slot(m)] += c;
        }
        self.transform(&mut buf, &self.inverse);
        buf
    }

    /// Discrete Fourier coefficients of grid values.
    pub fn analyze(&self, mut values: Vec<C64>) -> Spectrum {
        debug_assert_eq!(values.len(), self.len());
        self.transform(&mut values, &self.forward);
        let scale = 1.0 / self.len() as f64;
        values.iter_mut().for_each(|v| *v *= scale);
        Spectrum {
            grid: self.clone(),
            data: values,
        }
    }

    fn transform(&self, buf: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let p = self.p;
        let mut line = vec![C64::new(0.0, 0.0); p];
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..self.d {
            let stride = p.pow((self.d - 1 - axis) as u32);
            let block = stride * p;
            for outer in (0..buf.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (t, slot) in line.iter_mut().enumerate() {
                        *slot = buf[base + t * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (t, v) in line.iter().enumerate() {
                        buf[base + t * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Fourier coefficients on a quadrature grid, addressed by integer mode
/// (taken modulo the grid size).
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: QuadratureGrid,
    data: Vec<C64>,
}

impl Spectrum {
    pub fn get(&self, m: &[i64]) -> C64 {
        self.data[self.grid.slot(m)]
    }

    /// Coefficients at the modes of `lattice`, in lattice order.
    pub fn restrict(&self, lattice: &Lattice) -> Vec<C64> {
        lattice.modes().map(|m| self.get(m)).collect()
    }

    /// `ℓ²` norm of the coefficients that lie in the box of cutoff `outer`
    /// but outside `lattice`.
    pub fn norm_outside(&self, lattice: &Lattice, outer: usize) -> f64 {
        let ext = Lattice::new_unchecked(lattice.dim(), outer);
        ext.modes()
            .filter(|m| !lattice.contains(m))
            .map(|m| self.get(m).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}
