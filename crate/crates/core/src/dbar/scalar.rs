use super::{dbar_inverse, gauge_residual, require_plane, GaugeResult, GaugeVerdict};
use crate::fourier::{PeriodicField, QuadratureGrid, Rank, SobolevReport};
use crate::{Error, Result, C64};

/// Scalar gauge `∂̄f = g f` via `f = e^h`, `∂̄h = g`.
///
/// With `ĝ(0) ≠ 0` the outcome is [`GaugeVerdict::Obstructed`] carrying
/// `ĝ(0)` unchanged. Otherwise `h = ∂̄⁻¹g`, `f` is `exp(h)` sampled on a
/// quadrature grid and re-expanded to the lattice, and a residual above
/// `tol` is a tolerance error.
pub fn gauge_scalar(g: &PeriodicField, tol: f64) -> Result<GaugeResult> {
    require_plane(g)?;
    if g.rank() != Rank::Scalar {
        return Err(Error::Shape(format!("scalar gauge needs a scalar g, got {:?}", g.rank())));
    }
    let mean = g.mean()[0];
    if mean != C64::new(0.0, 0.0) {
        return Ok(GaugeResult::obstructed(vec![mean]));
    }
    let lat = g.lattice();
    let h = dbar_inverse(g)?;
    let grid = QuadratureGrid::for_products(lat);
    let exp_vals: Vec<C64> = grid.synthesize(lat, h.component(0)).into_iter().map(|z| z.exp()).collect();
    let f = PeriodicField::from_coefficients(lat, Rank::Scalar, grid.analyze(exp_vals).restrict(lat))?;
    let margin = grid
        .synthesize(lat, f.component(0))
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    let residual = gauge_residual(g, &f)?;
    if residual > tol {
        return Err(Error::Tolerance {
            what: "scalar gauge residual",
            value: residual,
            tol,
            advice: "increase the lattice cutoff N",
        });
    }
    Ok(GaugeResult {
        verdict: GaugeVerdict::Converged,
        obstruction: vec![mean],
        f: Some(f),
        h: Some(h),
        residual: Some(residual),
        margin: Some(margin),
        trace: Vec::new(),
    })
}

/// Gauge of the low-frequency part of `g` and the part left over.
#[derive(Debug, Clone)]
pub struct SplitGauge {
    pub gauge: GaugeResult,
    /// `ĝ(0)` plus the modes with `|m| > M`.
    pub remainder: PeriodicField,
    /// Remainder norms at `s = 0` and `s = 1`.
    pub remainder_norms: [SobolevReport; 2],
}

/// Splits `g = g_low + rest` with `g_low` carrying the modes
/// `0 < |m| ≤ cutoff` (Euclidean), gauges `g_low` exactly and returns the
/// ungauged remainder.
pub fn split_and_gauge(g: &PeriodicField, cutoff: f64, tol: f64) -> Result<SplitGauge> {
    require_plane(g)?;
    if g.rank() != Rank::Scalar {
        return Err(Error::Shape(format!("split gauge needs a scalar g, got {:?}", g.rank())));
    }
    let low_sq = cutoff * cutoff;
    let is_low = |m: &[i64]| {
        let r2 = (m[0] * m[0] + m[1] * m[1]) as f64;
        r2 > 0.0 && r2 <= low_sq
    };
    let zero = C64::new(0.0, 0.0);
    let low = g.map_modes(|m, c| if is_low(m) { c } else { zero }).without_mean();
    let remainder = g.map_modes(|m, c| if is_low(m) { zero } else { c });
    let gauge = gauge_scalar(&low, tol)?;
    let remainder_norms = [remainder.sobolev_norm(0.0), remainder.sobolev_norm(1.0)];
    Ok(SplitGauge {
        gauge,
        remainder,
        remainder_norms,
    })
}
