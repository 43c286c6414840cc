use torus_spectral::bloch::{brillouin_grid, compute_bands, BandTable};

use crate::error::{guard, invalid, write_out, TsStatus};
use crate::hamiltonian::{handle, TsHamiltonian};

/// Opaque band table over a Brillouin-zone grid.
pub struct TsBandTable(BandTable);

/// The `band_count` lowest bands on a grid of `points_per_axis^d` real
/// quasimomenta in `[−π, π]^d`.
#[no_mangle]
pub unsafe extern "C" fn ts_bands_compute(
    h: *const TsHamiltonian,
    points_per_axis: usize,
    band_count: usize,
    out: *mut *mut TsBandTable,
) -> TsStatus {
    guard(|| {
        let h = &handle(h)?.0;
        let grid = brillouin_grid(h.lattice().dim(), points_per_axis);
        let table = compute_bands(h, &grid, band_count)?;
        write_out(out, Box::into_raw(Box::new(TsBandTable(table))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_bands_destroy(table: *mut TsBandTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of grid points and bands.
#[no_mangle]
pub unsafe extern "C" fn ts_bands_shape(table: *const TsBandTable, points: *mut usize, bands: *mut usize) -> TsStatus {
    guard(|| {
        let t = &handle(table)?.0;
        write_out(points, t.k_grid.len())?;
        write_out(bands, t.band_count)
    })
}

/// `λ_band` at grid point `point`; the point's `d` coordinates are written
/// to `k_out` when it is non-null.
#[no_mangle]
pub unsafe extern "C" fn ts_bands_get(
    table: *const TsBandTable,
    point: usize,
    band: usize,
    k_out: *mut f64,
    out: *mut f64,
) -> TsStatus {
    guard(|| {
        let t = &handle(table)?.0;
        let row = t
            .bands
            .get(point)
            .ok_or_else(|| invalid(format!("grid point {point} out of range")))?;
        let value = *row
            .get(band)
            .ok_or_else(|| invalid(format!("band {band} out of range")))?;
        if !k_out.is_null() {
            for (i, &k) in t.k_grid[point].iter().enumerate() {
                k_out.add(i).write(k);
            }
        }
        write_out(out, value)
    })
}
