use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_cover, local_inverse, zero_set, DualCover, LocalInverse, LocalMode, PatchClass, NEUMANN_ORDER};
use crate::linalg::{sigma_max, SingularValueMethod};
use crate::operator::{AssembledOperator, ComplexQuasimomentum, MagneticHamiltonian};
use crate::{Error, Result, C64};

/// Which local inverse near patches receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NearPolicy {
    Direct,
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametrixOptions {
    pub delta: f64,
    pub thickness: f64,
    pub near: NearPolicy,
    pub neumann_order: usize,
    pub method: SingularValueMethod,
}

impl Default for ParametrixOptions {
    fn default() -> Self {
        Self {
            delta: 0.5,
            thickness: 1.0,
            near: NearPolicy::Direct,
            neumann_order: NEUMANN_ORDER,
            method: SingularValueMethod::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametrixReport {
    pub rho: f64,
    pub delta: f64,
    pub tile_side: usize,
    pub patch_count: usize,
    pub near_count: usize,
    pub multiplicity: usize,
    /// `‖R_{ρ,j}‖` per patch.
    pub local_norms: Vec<f64>,
    /// `‖T_{ρ,j}‖` per patch.
    pub local_residuals: Vec<f64>,
    /// `‖R_ρ P − I‖` with `P` the assembled operator.
    pub t_norm: f64,
    pub r_norm: f64,
}

/// `R_ρ = Σ_j φ_j R_j ψ_j` as a dense matrix.
fn glue(dim: usize, cover: &DualCover, locals: &[LocalInverse]) -> Mat<C64> {
    let mut r = Mat::<C64>::zeros(dim, dim);
    for (patch, local) in cover.patches.iter().zip(locals) {
        for &col in &patch.psi {
            let c = local.phi.binary_search(&col).expect("ψ is contained in φ");
            for (row_pos, &row) in local.phi.iter().enumerate() {
                r[(row, col)] += local.matrix[(row_pos, c)];
            }
        }
    }
    r
}

pub fn assemble_parametrix(
    op: &AssembledOperator,
    cover: &DualCover,
    locals: &[LocalInverse],
    method: SingularValueMethod,
) -> Result<ParametrixReport> {
    if locals.len() != cover.len() || locals.iter().enumerate().any(|(j, l)| l.patch != j) {
        return Err(Error::Shape(format!(
            "need one local inverse per patch in order, got {} for {} patches",
            locals.len(),
            cover.len()
        )));
    }
    let n = op.dim();
    let r = glue(n, cover, locals);
    let mut t = &r * op.matrix();
    for i in 0..n {
        t[(i, i)] -= C64::new(1.0, 0.0);
    }
    Ok(ParametrixReport {
        rho: cover.rho,
        delta: cover.delta,
        tile_side: cover.tile_side,
        patch_count: cover.len(),
        near_count: cover.near_count(),
        multiplicity: cover.phi_multiplicity(),
        local_norms: locals.iter().map(|l| l.norm).collect(),
        local_residuals: locals.iter().map(|l| l.residual).collect(),
        t_norm: sigma_max(&t, method)?.value,
        r_norm: sigma_max(&r, method)?.value,
    })
}

/// Builds the cover for `k`, computes every local inverse in parallel and
/// glues them against `H(k)Λ_ρ⁻¹`.
pub fn parametrix_at(h: &MagneticHamiltonian, k: &ComplexQuasimomentum, options: &ParametrixOptions) -> Result<ParametrixReport> {
    let op = h.assemble(k, true)?;
    let slab = zero_set(k.rho(), k.beta(), k.direction(), h.lattice(), options.thickness)?;
    let cover = build_cover(k.rho(), options.delta, h.lattice(), &slab)?;
    let locals = (0..cover.len())
        .into_par_iter()
        .map(|j| {
            let mode = match (cover.patches[j].class, options.near) {
                (PatchClass::Far, _) => LocalMode::Far,
                (PatchClass::Near, NearPolicy::Direct) => LocalMode::NearDirect,
                (PatchClass::Near, NearPolicy::Model) => LocalMode::NearModel,
            };
            local_inverse(h, &op, &cover, j, mode, options.neumann_order)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble_parametrix(&op, &cover, &locals, options.method)
}
