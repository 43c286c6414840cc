use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{DualCover, PatchClass};
use crate::dbar::split_and_gauge;
use crate::fourier::{lambda_weight, Lattice, PeriodicField, Rank};
use crate::linalg::{sigma_max, SingularValueMethod};
use crate::operator::{symbol_h0, AssembledOperator, MagneticHamiltonian};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalMode {
    /// Neumann series around the diagonal of the `φ` block.
    Far,
    /// Pseudoinverse of the `φ` block.
    NearDirect,
    /// Gauge-conjugated diagonal inverse of the model linearised at the
    /// patch centre (d = 2 only).
    NearModel,
}

impl LocalMode {
    fn as_str(&self) -> &'static str {
        match self {
            LocalMode::Far => "far",
            LocalMode::NearDirect => "near-direct",
            LocalMode::NearModel => "near-model",
        }
    }
}

pub const NEUMANN_ORDER: usize = 4;

/// Blocks below this `σ_min/σ_max` are treated as singular.
const RANK_TOL: f64 = 1e-12;

/// A local approximate inverse `R_j` acting on the modes `phi`.
#[derive(Debug, Clone)]
pub struct LocalInverse {
    pub patch: usize,
    pub mode: LocalMode,
    pub phi: Vec<usize>,
    pub matrix: Mat<C64>,
    /// `‖R_j‖`.
    pub norm: f64,
    /// `‖R_j P[φ_j, ψ_j] − I[φ_j, ψ_j]‖`.
    pub residual: f64,
    /// Near-model only: `‖R_model − R_direct‖ / ‖R_direct‖`.
    pub model_deviation: Option<f64>,
    /// Near-model only: residual of the scalar gauge solve.
    pub gauge_residual: Option<f64>,
}

fn block(p: &Mat<C64>, rows: &[usize], cols: &[usize]) -> Mat<C64> {
    Mat::from_fn(rows.len(), cols.len(), |r, c| p[(rows[r], cols[c])])
}

/// Positions of the `ψ` modes inside the `φ` list.
fn psi_positions(phi: &[usize], psi: &[usize]) -> Vec<usize> {
    psi.iter()
        .map(|i| phi.binary_search(i).expect("ψ is contained in φ"))
        .collect()
}

fn patch_residual(r: &Mat<C64>, p: &Mat<C64>, phi: &[usize], psi: &[usize]) -> Result<f64> {
    let pos = psi_positions(phi, psi);
    let mut t = r * block(p, phi, psi);
    for (c, &row) in pos.iter().enumerate() {
        t[(row, c)] -= C64::new(1.0, 0.0);
    }
    Ok(sigma_max(&t, SingularValueMethod::Auto)?.value)
}

/// Local approximate inverse on patch `j` of `op = H(k)` or `H(k)Λ_ρ⁻¹`.
///
/// `h` supplies the potentials for the near-model path and must be the
/// Hamiltonian `op` was assembled from.
pub fn local_inverse(
    h: &MagneticHamiltonian,
    op: &AssembledOperator,
    cover: &DualCover,
    j: usize,
    mode: LocalMode,
    neumann_order: usize,
) -> Result<LocalInverse> {
    let patch = cover
        .patches
        .get(j)
        .ok_or_else(|| Error::Shape(format!("patch index {j} out of range ({} patches)", cover.len())))?;
    if cover.lattice_len != op.dim() {
        return Err(Error::Shape(format!(
            "cover has {} modes, operator {}",
            cover.lattice_len,
            op.dim()
        )));
    }
    if mode == LocalMode::Far && patch.class == PatchClass::Near {
        return Err(Error::Classification {
            patch: j,
            actual: patch.class.as_str(),
            requested: mode.as_str(),
        });
    }
    let p = op.matrix();
    let phi = &patch.phi;
    let pb = block(p, phi, phi);
    let (matrix, residual, model_deviation, gauge_residual) = match mode {
        LocalMode::Far => {
            let (r, res) = neumann(&pb, &psi_positions(phi, &patch.psi), neumann_order)?;
            (r, res, None, None)
        }
        LocalMode::NearDirect => {
            let r = pseudoinverse(&pb, j)?;
            let res = patch_residual(&r, p, phi, &patch.psi)?;
            (r, res, None, None)
        }
        LocalMode::NearModel => {
            let (r, gauge_res) = model_inverse(h, op, &patch.center, phi)?;
            let res = patch_residual(&r, p, phi, &patch.psi)?;
            let direct = pseudoinverse(&pb, j)?;
            let scale = sigma_max(&direct, SingularValueMethod::Auto)?.value;
            let dev = sigma_max(&(&r - &direct), SingularValueMethod::Auto)?.value / scale;
            (r, res, Some(dev), Some(gauge_res))
        }
    };
    let norm = sigma_max(&matrix, SingularValueMethod::Auto)?.value;
    Ok(LocalInverse {
        patch: j,
        mode,
        phi: phi.clone(),
        matrix,
        norm,
        residual,
        model_deviation,
        gauge_residual,
    })
}

/// `R = Σ_{i≤K} X^i D⁻¹` with `X = −D⁻¹W`, so that `R(D + W) = I − X^{K+1}`.
/// The residual is read off `X^{K+1}` on the `ψ` columns, exactly zero for
/// a diagonal block.
fn neumann(pb: &Mat<C64>, psi_pos: &[usize], order: usize) -> Result<(Mat<C64>, f64)> {
    let n = pb.nrows();
    let diag: Vec<C64> = (0..n).map(|i| pb[(i, i)]).collect();
    if let Some(i) = diag.iter().position(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::Precondition(format!("far block has a zero diagonal entry at {i}")));
    }
    let x = Mat::from_fn(n, n, |r, c| if r == c { C64::new(0.0, 0.0) } else { -pb[(r, c)] / diag[r] });
    let mut term = Mat::from_fn(n, n, |r, c| if r == c { C64::new(1.0, 0.0) / diag[r] } else { C64::new(0.0, 0.0) });
    let mut r = term.clone();
    let mut power = x.clone();
    for _ in 0..order {
        term = &x * &term;
        r += &term;
        power = &x * &power;
    }
    let tail = Mat::from_fn(n, psi_pos.len(), |row, c| -power[(row, psi_pos[c])]);
    Ok((r, sigma_max(&tail, SingularValueMethod::Auto)?.value))
}

fn pseudoinverse(pb: &Mat<C64>, patch: usize) -> Result<Mat<C64>> {
    let svd = pb
        .svd()
        .map_err(|e| Error::Backend(format!("SVD of patch {patch} did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    let n = s.nrows();
    let (top, bottom) = (s[0].re, s[n - 1].re);
    if !(bottom > RANK_TOL * top) {
        return Err(Error::Rank {
            patch,
            sigma_min: bottom,
        });
    }
    let (u, v) = (svd.U(), svd.V());
    let scaled = Mat::from_fn(n, n, |r, c| v[(r, c)] / s[c].re);
    Ok(&scaled * u.adjoint())
}

/// Model inverse `Λ C_f diag(1/(H₀ + q̂(0))) C_{1/f}` where `q` collects the
/// zeroth-order terms frozen at the patch centre `m₀` and `f = e^h` gauges
/// away `q − q̂(0)` against the dominant first-order part of the linearised
/// symbol. The linear part is `α∂̄ + γ∂`; when `|γ| > |α|` the gauge is solved
/// in the reflected coordinates `(x₁, −x₂)`, where `∂` becomes `∂̄`.
fn model_inverse(h: &MagneticHamiltonian, op: &AssembledOperator, m0: &[i64], phi: &[usize]) -> Result<(Mat<C64>, f64)> {
    use std::f64::consts::PI;
    let lat = op.lattice();
    if lat.dim() != 2 {
        return Err(Error::Precondition(format!("near-model inverses need d = 2, got d = {}", lat.dim())));
    }
    let k = op.k();
    let grad: Vec<C64> = (0..2).map(|j| (k[j] + 2.0 * PI * m0[j] as f64) * (4.0 * PI)).collect();
    let i = C64::new(0.0, 1.0);
    let alpha = (-i * grad[0] - grad[1]) / (2.0 * PI);
    let gamma = (-i * grad[0] + grad[1]) / (2.0 * PI);
    let reflect = gamma.norm() > alpha.norm();
    let lead = if reflect { gamma } else { alpha };
    if lead == C64::new(0.0, 0.0) {
        return Err(Error::Precondition("linearised symbol vanishes at the patch centre".into()));
    }
    let q = frozen_potential(h, lat, &grad)?;
    let mean = q.mean()[0];
    let flip = |u: &PeriodicField| {
        if reflect {
            u.map_modes(|m, _| u.get(0, &[m[0], -m[1]]))
        } else {
            u.clone()
        }
    };
    let g = flip(&q.scale(-1.0 / lead));
    let forward = split_and_gauge(&g, f64::INFINITY, f64::INFINITY)?.gauge;
    let backward = split_and_gauge(&g.scale(C64::new(-1.0, 0.0)), f64::INFINITY, f64::INFINITY)?.gauge;
    let f = flip(forward.f.as_ref().expect("mean-free gauge converges"));
    let finv = flip(backward.f.as_ref().expect("mean-free gauge converges"));
    let conv = |field: &PeriodicField| {
        Mat::from_fn(phi.len(), phi.len(), |r, c| {
            let delta: Vec<i64> = lat.mode(phi[r]).iter().zip(lat.mode(phi[c])).map(|(a, b)| a - b).collect();
            lat.index_of(&delta).map_or(C64::new(0.0, 0.0), |idx| field.component(0)[idx])
        })
    };
    let right = conv(&finv);
    let mut middle = Mat::from_fn(phi.len(), phi.len(), |r, c| {
        let m = lat.mode(phi[r]);
        right[(r, c)] / (symbol_h0(k, m) + mean)
    });
    if let Some(rho) = op.preconditioned() {
        for r in 0..phi.len() {
            let w = lambda_weight(rho, lat.norm_sq(phi[r]));
            for c in 0..phi.len() {
                middle[(r, c)] *= w;
            }
        }
    }
    let left = conv(&f);
    let residual = forward.residual.unwrap_or(0.0).max(backward.residual.unwrap_or(0.0));
    Ok((&left * &middle, residual))
}

/// `q = Σ_j ∂_jH₀(m₀)/(2π) · A_j + A·A + V`, i.e. the first-order magnetic
/// term with its momentum frozen at the patch centre.
fn frozen_potential(h: &MagneticHamiltonian, lat: &Lattice, grad: &[C64]) -> Result<PeriodicField> {
    use std::f64::consts::PI;
    let mut q = PeriodicField::zeros(lat, Rank::Scalar);
    if let Some(a) = h.magnetic() {
        for (j, gj) in grad.iter().enumerate() {
            q = q.add(&a.component_field(j).scale(gj / (2.0 * PI)))?;
        }
        q = q.add(&a.convolve(a)?.field)?;
    }
    if let Some(v) = h.electric() {
        q = q.add(v)?;
    }
    Ok(q)
}
