use std::ffi::c_char;

use torus_spectral::fourier::literal::parse_field;
use torus_spectral::fourier::Lattice;
use torus_spectral::linalg::{sigma_min, SingularValueMethod};
use torus_spectral::operator::{ComplexQuasimomentum, MagneticHamiltonian};

use crate::error::{guard, invalid, null, slice_arg, str_arg, write_out, Failure, TsStatus};

/// Opaque Hamiltonian `(D + k + A)² + V` on a truncated lattice.
pub struct TsHamiltonian(pub(crate) MagneticHamiltonian);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsSvMethod {
    Auto = 0,
    Dense = 1,
    Lanczos = 2,
}

/// Decodes a `TsSvMethod` value passed as a plain integer.
pub(crate) fn sv_method(raw: i32) -> Result<SingularValueMethod, Failure> {
    match raw {
        x if x == TsSvMethod::Auto as i32 => Ok(SingularValueMethod::Auto),
        x if x == TsSvMethod::Dense as i32 => Ok(SingularValueMethod::DenseSvd),
        x if x == TsSvMethod::Lanczos as i32 => Ok(SingularValueMethod::Lanczos),
        x => Err(invalid(format!("unknown singular value method {x}"))),
    }
}

pub(crate) unsafe fn handle<'a, T>(ptr: *const T) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(null)
}

/// Builds a Hamiltonian on the lattice `(d, n)`. `a_literal` and
/// `v_literal` are field literals (vector and scalar) or null for zero.
#[no_mangle]
pub unsafe extern "C" fn ts_hamiltonian_new(
    d: usize,
    n: usize,
    a_literal: *const c_char,
    v_literal: *const c_char,
    out: *mut *mut TsHamiltonian,
) -> TsStatus {
    guard(|| {
        let lattice = Lattice::new(d, n)?;
        let parse = |p: *const c_char| -> Result<_, Failure> {
            if p.is_null() {
                Ok(None)
            } else {
                Ok(Some(parse_field(str_arg(p)?)?))
            }
        };
        let h = MagneticHamiltonian::new(&lattice, parse(a_literal)?, parse(v_literal)?)?;
        write_out(out, Box::into_raw(Box::new(TsHamiltonian(h))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_hamiltonian_destroy(h: *mut TsHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of lattice modes, i.e. the matrix dimension.
#[no_mangle]
pub unsafe extern "C" fn ts_hamiltonian_dim(h: *const TsHamiltonian, out: *mut usize) -> TsStatus {
    guard(|| write_out(out, handle(h)?.0.lattice().len()))
}

pub(crate) unsafe fn quasimomentum(
    h: &MagneticHamiltonian,
    e: *const f64,
    beta: f64,
    rho: f64,
) -> Result<ComplexQuasimomentum, Failure> {
    let d = h.lattice().dim();
    let e = slice_arg(e, d)?;
    Ok(ComplexQuasimomentum::new(e.to_vec(), beta, rho)?)
}

/// `σ_min` of `H(k)` (or `H(k)Λ_ρ⁻¹` when `precondition` is nonzero) at
/// `k = 2π(β + iρ)e`; `e` has `d` entries and `method` is a `TsSvMethod`.
#[no_mangle]
pub unsafe extern "C" fn ts_sigma_min(
    h: *const TsHamiltonian,
    e: *const f64,
    beta: f64,
    rho: f64,
    precondition: i32,
    method: i32,
    out: *mut f64,
) -> TsStatus {
    guard(|| {
        let h = &handle(h)?.0;
        let k = quasimomentum(h, e, beta, rho)?;
        if precondition != 0 && rho <= 0.0 {
            return Err(invalid("preconditioning needs rho > 0"));
        }
        let op = h.assemble(&k, precondition != 0)?;
        let s = sigma_min(op.matrix(), sv_method(method)?)?;
        write_out(out, s.value)
    })
}
