//! Extreme singular values and Hermitian spectra of dense complex matrices.
//!
//! Two independent routes to `σ_min`: a full dense SVD, and Lanczos with
//! full reorthogonalisation on `(MᴴM)⁻¹ = M⁻¹M⁻ᴴ` driven by an LU
//! factorisation. `σ_max` uses Lanczos on `MᴴM` directly.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularValueMethod {
    DenseSvd,
    Lanczos,
    /// Dense SVD up to [`AUTO_DENSE_LIMIT`] rows, Lanczos beyond.
    Auto,
}

pub const AUTO_DENSE_LIMIT: usize = 400;

/// A singular value together with the method that produced it and, for the
/// iterative route, the final Ritz residual relative to the Ritz value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularValue {
    pub value: f64,
    pub method: SingularValueMethod,
    pub relative_residual: f64,
    pub iterations: usize,
}

const LANCZOS_TOL: f64 = 1e-13;
const LANCZOS_SEED: u64 = 0x5eed_1a2c;

fn resolve(method: SingularValueMethod, n: usize) -> SingularValueMethod {
    match method {
        SingularValueMethod::Auto if n <= AUTO_DENSE_LIMIT => SingularValueMethod::DenseSvd,
        SingularValueMethod::Auto => SingularValueMethod::Lanczos,
        m => m,
    }
}

pub fn singular_values(m: &Mat<C64>) -> Result<Vec<f64>> {
    m.singular_values()
        .map_err(|e| Error::Backend(format!("SVD did not converge: {e:?}")))
}

pub fn sigma_min(m: &Mat<C64>, method: SingularValueMethod) -> Result<SingularValue> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Shape(format!("sigma_min needs a square matrix, got {}x{}", n, m.ncols())));
    }
    if n == 0 {
        return Err(Error::Shape("sigma_min of an empty matrix".into()));
    }
    match resolve(method, n) {
        SingularValueMethod::DenseSvd => {
            let s = singular_values(m)?;
            Ok(SingularValue {
                value: s[n - 1],
                method: SingularValueMethod::DenseSvd,
                relative_residual: 0.0,
                iterations: 0,
            })
        }
        _ => {
            let lu = m.partial_piv_lu();
            // Singular input shows up as non-finite solves; report σ = 0.
            let apply = |x: &[C64]| -> Vec<C64> {
                use faer::linalg::solvers::Solve;
                let mut rhs = Mat::from_fn(n, 1, |i, _| x[i]);
                lu.solve_adjoint_in_place(rhs.as_mut());
                lu.solve_in_place(rhs.as_mut());
                rhs.col_as_slice(0).to_vec()
            };
            let ritz = lanczos_largest(n, apply);
            let value = if ritz.theta.is_finite() && ritz.theta > 0.0 {
                1.0 / ritz.theta.sqrt()
            } else {
                0.0
            };
            Ok(SingularValue {
                value,
                method: SingularValueMethod::Lanczos,
                relative_residual: ritz.relative_residual,
                iterations: ritz.iterations,
            })
        }
    }
}

pub fn sigma_max(m: &Mat<C64>, method: SingularValueMethod) -> Result<SingularValue> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return Ok(SingularValue {
            value: 0.0,
            method: SingularValueMethod::DenseSvd,
            relative_residual: 0.0,
            iterations: 0,
        });
    }
    match resolve(method, rows.max(cols)) {
        SingularValueMethod::DenseSvd => Ok(SingularValue {
            value: singular_values(m)?[0],
            method: SingularValueMethod::DenseSvd,
            relative_residual: 0.0,
            iterations: 0,
        }),
        _ => {
            let apply = |x: &[C64]| -> Vec<C64> {
                let v = Mat::from_fn(cols, 1, |i, _| x[i]);
                let mv = m * &v;
                let out = m.adjoint() * &mv;
                out.col_as_slice(0).to_vec()
            };
            let ritz = lanczos_largest(cols, apply);
            Ok(SingularValue {
                value: ritz.theta.max(0.0).sqrt(),
                method: SingularValueMethod::Lanczos,
                relative_residual: ritz.relative_residual,
                iterations: ritz.iterations,
            })
        }
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order (lower triangle
/// read).
pub fn hermitian_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Backend(format!("Hermitian eigensolver did not converge: {e:?}")))
}

struct Ritz {
    theta: f64,
    relative_residual: f64,
    iterations: usize,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator by
/// Lanczos with full reorthogonalisation.
fn lanczos_largest(n: usize, apply: impl Fn(&[C64]) -> Vec<C64>) -> Ritz {
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut q: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|x| *x /= q_norm);

    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut best = Ritz {
        theta: 0.0,
        relative_residual: f64::INFINITY,
        iterations: 0,
    };
    for j in 0..n {
        let mut w = apply(&q);
        let a = dot(&q, &w).re;
        basis.push(q.clone());
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let steps = j + 1;
        let breakdown = !(b > 1e-300) || !b.is_finite();
        let check = breakdown || steps == n || steps <= 10 || steps % 5 == 0;
        if check {
            let (theta, last) = tridiagonal_top(&alpha, &beta);
            let resid = if breakdown { 0.0 } else { b * last.abs() };
            best = Ritz {
                theta,
                relative_residual: if theta > 0.0 { resid / theta } else { resid },
                iterations: steps,
            };
            if breakdown || best.relative_residual <= LANCZOS_TOL || !theta.is_finite() {
                break;
            }
        }
        beta.push(b);
        q = w.into_iter().map(|x| x / b).collect();
    }
    best
}

/// Largest eigenvalue of the symmetric tridiagonal matrix and the last
/// component of its unit eigenvector.
fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    if alpha.iter().chain(beta).any(|x| !x.is_finite()) {
        return (f64::INFINITY, 0.0);
    }
    let t = Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    match t.self_adjoint_eigen(Side::Lower) {
        Ok(evd) => {
            let s = evd.S();
            let top = s.column_vector()[k - 1];
            let last = evd.U()[(k - 1, k - 1)];
            (top, last)
        }
        Err(_) => (f64::INFINITY, 0.0),
    }
}
