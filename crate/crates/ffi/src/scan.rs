use std::ffi::c_char;

use torus_spectral::thomas::{parametrix_at, thomas_scan, EstimateScan, ParametrixOptions, ScanOptions};

use crate::error::{guard, into_c_string, invalid, slice_arg, write_out, TsStatus};
use crate::hamiltonian::{handle, quasimomentum, sv_method, TsHamiltonian};

/// Opaque result of a ρ scan.
pub struct TsScan(EstimateScan);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsScanRow {
    pub rho: f64,
    pub sigma_min_h: f64,
    pub sigma_min_precond: f64,
    /// NaN when the scan ran without the parametrix.
    pub t_rho_norm: f64,
    pub below_floor: i32,
}

/// Scans `rho[0..count]` (positive, ascending). A `delta` in `(0, 1)` also
/// measures `‖T_ρ‖` with that cover exponent; pass 0 to skip it.
#[no_mangle]
pub unsafe extern "C" fn ts_thomas_scan(
    h: *const TsHamiltonian,
    e: *const f64,
    beta: f64,
    rho: *const f64,
    count: usize,
    floor: f64,
    delta: f64,
    method: i32,
    out: *mut *mut TsScan,
) -> TsStatus {
    guard(|| {
        let h = &handle(h)?.0;
        let e = slice_arg(e, h.lattice().dim())?;
        let rho = slice_arg(rho, count)?;
        let method = sv_method(method)?;
        let parametrix = (delta != 0.0).then(|| ParametrixOptions {
            delta,
            method,
            ..Default::default()
        });
        let options = ScanOptions {
            floor,
            method,
            parametrix,
        };
        let scan = thomas_scan(h, e, beta, rho, &options)?;
        write_out(out, Box::into_raw(Box::new(TsScan(scan))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_scan_destroy(scan: *mut TsScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ts_scan_len(scan: *const TsScan, out: *mut usize) -> TsStatus {
    guard(|| write_out(out, handle(scan)?.0.rows.len()))
}

#[no_mangle]
pub unsafe extern "C" fn ts_scan_row(scan: *const TsScan, index: usize, out: *mut TsScanRow) -> TsStatus {
    guard(|| {
        let rows = &handle(scan)?.0.rows;
        let r = rows
            .get(index)
            .ok_or_else(|| invalid(format!("row {index} out of range ({} rows)", rows.len())))?;
        write_out(
            out,
            TsScanRow {
                rho: r.rho,
                sigma_min_h: r.sigma_min_h,
                sigma_min_precond: r.sigma_min_precond,
                t_rho_norm: r.t_rho_norm.unwrap_or(f64::NAN),
                below_floor: r.below_floor as i32,
            },
        )
    })
}

/// Fitted growth constant `Ĉ` in `σ_min(H) ≈ Ĉρ`.
#[no_mangle]
pub unsafe extern "C" fn ts_scan_fitted_c(scan: *const TsScan, out: *mut f64) -> TsStatus {
    guard(|| write_out(out, handle(scan)?.0.fitted_c))
}

/// The scan CSV; release with `ts_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ts_scan_csv(scan: *const TsScan, out: *mut *mut c_char) -> TsStatus {
    guard(|| write_out(out, into_c_string(handle(scan)?.0.to_csv())))
}

/// `‖T_ρ‖` and `‖R_ρ‖` of the glued parametrix at one `k`.
#[no_mangle]
pub unsafe extern "C" fn ts_parametrix_residual(
    h: *const TsHamiltonian,
    e: *const f64,
    beta: f64,
    rho: f64,
    delta: f64,
    t_norm: *mut f64,
    r_norm: *mut f64,
) -> TsStatus {
    guard(|| {
        let h = &handle(h)?.0;
        let k = quasimomentum(h, e, beta, rho)?;
        let report = parametrix_at(
            h,
            &k,
            &ParametrixOptions {
                delta,
                ..Default::default()
            },
        )?;
        write_out(t_norm, report.t_norm)?;
        write_out(r_norm, report.r_norm)
    })
}
