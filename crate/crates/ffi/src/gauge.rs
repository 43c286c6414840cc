use std::ffi::c_char;

use torus_spectral::dbar::{gauge_scalar, GaugeVerdict};
use torus_spectral::fourier::literal::parse_field;

use crate::error::{guard, str_arg, write_out, TsStatus};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsVerdict {
    Converged = 0,
    Obstructed = 1,
    Diverged = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsGaugeOutcome {
    pub verdict: TsVerdict,
    pub obstruction_re: f64,
    pub obstruction_im: f64,
    /// NaN when obstructed.
    pub residual: f64,
    /// NaN when obstructed.
    pub margin: f64,
}

/// Scalar gauge `∂̄f = g f` for a scalar field literal `g` on a d = 2
/// lattice. An obstruction is a successful call with that verdict.
#[no_mangle]
pub unsafe extern "C" fn ts_gauge_scalar(g_literal: *const c_char, tol: f64, out: *mut TsGaugeOutcome) -> TsStatus {
    guard(|| {
        let g = parse_field(str_arg(g_literal)?)?;
        let r = gauge_scalar(&g, tol)?;
        let verdict = match r.verdict {
            GaugeVerdict::Converged => TsVerdict::Converged,
            GaugeVerdict::Obstructed => TsVerdict::Obstructed,
            GaugeVerdict::Diverged => TsVerdict::Diverged,
        };
        write_out(
            out,
            TsGaugeOutcome {
                verdict,
                obstruction_re: r.obstruction[0].re,
                obstruction_im: r.obstruction[0].im,
                residual: r.residual.unwrap_or(f64::NAN),
                margin: r.margin.unwrap_or(f64::NAN),
            },
        )
    })
}
