use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{parametrix_at, ParametrixOptions};
use crate::linalg::{sigma_min, SingularValueMethod};
use crate::operator::{ComplexQuasimomentum, MagneticHamiltonian};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Rows with `σ_min(H(k)Λ_ρ⁻¹)` below this are flagged.
    pub floor: f64,
    pub method: SingularValueMethod,
    /// When set, every row also carries `‖T_ρ‖`.
    pub parametrix: Option<ParametrixOptions>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            floor: 0.0,
            method: SingularValueMethod::Auto,
            parametrix: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub rho: f64,
    pub sigma_min_h: f64,
    pub sigma_min_precond: f64,
    pub method: SingularValueMethod,
    pub below_floor: bool,
    pub t_rho_norm: Option<f64>,
}

/// `σ_min` of `H(k)` and `H(k)Λ_ρ⁻¹` along `k = 2π(β + iρ)e`, sorted by ρ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateScan {
    pub direction: Vec<f64>,
    pub beta: f64,
    pub delta: Option<f64>,
    pub floor: f64,
    pub rows: Vec<ScanRow>,
    /// Least-squares slope through the origin of `σ_min(H) ≈ Ĉρ` over the
    /// rows left after dropping the smallest 20% of ρ values.
    pub fitted_c: f64,
}

impl EstimateScan {
    pub fn flagged(&self) -> Vec<f64> {
        self.rows.iter().filter(|r| r.below_floor).map(|r| r.rho).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,sigma_min_H,sigma_min_precond,fitted_C,T_rho_norm\n");
        for r in &self.rows {
            let t = r.t_rho_norm.map(|t| format!("{t:.16e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{t}",
                r.rho, r.sigma_min_h, r.sigma_min_precond, self.fitted_c
            );
        }
        out
    }
}

pub fn fit_growth(rows: &[ScanRow]) -> f64 {
    let skip = rows.len() / 5;
    let (num, den) = rows[skip..]
        .iter()
        .fold((0.0, 0.0), |(n, d), r| (n + r.rho * r.sigma_min_h, d + r.rho * r.rho));
    num / den
}

pub fn thomas_scan(
    h: &MagneticHamiltonian,
    direction: &[f64],
    beta: f64,
    rho_list: &[f64],
    options: &ScanOptions,
) -> Result<EstimateScan> {
    if rho_list.is_empty() {
        return Err(Error::Domain("ρ list is empty".into()));
    }
    if rho_list.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || rho_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("ρ list must be positive and strictly ascending, got {rho_list:?}")));
    }
    let rows = rho_list
        .par_iter()
        .map(|&rho| {
            let k = ComplexQuasimomentum::new(direction.to_vec(), beta, rho)?;
            let plain = sigma_min(h.assemble(&k, false)?.matrix(), options.method)?;
            let pre = sigma_min(h.assemble(&k, true)?.matrix(), options.method)?;
            let t_rho_norm = match &options.parametrix {
                Some(p) => Some(parametrix_at(h, &k, p)?.t_norm),
                None => None,
            };
            Ok(ScanRow {
                rho,
                sigma_min_h: plain.value,
                sigma_min_precond: pre.value,
                method: plain.method,
                below_floor: pre.value < options.floor,
                t_rho_norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateScan {
        direction: direction.to_vec(),
        beta,
        delta: options.parametrix.map(|p| p.delta),
        floor: options.floor,
        fitted_c: fit_growth(&rows),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fourier::Lattice;

    /// `min_m |H₀(k, m)|` by enumeration of the diagonal symbol.
    fn diagonal_min(n: i64, beta: f64, rho: f64, precondition: bool) -> f64 {
        let mut best = f64::INFINITY;
        for m1 in -n..=n {
            for m2 in -n..=n {
                let w1 = m1 as f64 + beta;
                let re = w1 * w1 + (m2 * m2) as f64 - rho * rho;
                let im = 2.0 * rho * w1;
                let mut v = 4.0 * PI * PI * re.hypot(im);
                if precondition {
                    v /= (rho * rho + (m1 * m1 + m2 * m2) as f64).sqrt();
                }
                best = best.min(v);
            }
        }
        best
    }

    #[test]
    fn free_scan_matches_diagonal() {
        let lat = Lattice::new(2, 10).unwrap();
        let h = MagneticHamiltonian::free(&lat);
        let rhos = [5.0, 10.0];
        let scan = thomas_scan(&h, &[1.0, 0.0], 0.5, &rhos, &ScanOptions::default()).unwrap();
        for row in &scan.rows {
            let plain = diagonal_min(10, 0.5, row.rho, false);
            let pre = diagonal_min(10, 0.5, row.rho, true);
            assert!((row.sigma_min_h - plain).abs() <= 1e-9 * plain);
            assert!((row.sigma_min_precond - pre).abs() <= 1e-9 * pre);
            assert!(row.sigma_min_h >= 4.0 * PI * PI * row.rho);
        }
        assert!((scan.rows[1].sigma_min_h - 394.9).abs() < 0.1);
    }

    #[test]
    fn growth_fit_skips_smallest() {
        let row = |rho: f64, s: f64| ScanRow {
            rho,
            sigma_min_h: s,
            sigma_min_precond: 1.0,
            method: SingularValueMethod::DenseSvd,
            below_floor: false,
            t_rho_norm: None,
        };
        let rows: Vec<ScanRow> = [1.0, 2.0, 3.0, 4.0, 5.0]
            .iter()
            .map(|&r| row(r, if r == 1.0 { 100.0 } else { 3.0 * r }))
            .collect();
        assert!((fit_growth(&rows) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn floor_flags_rows() {
        let lat = Lattice::new(2, 4).unwrap();
        let h = MagneticHamiltonian::free(&lat);
        let opts = ScanOptions {
            floor: 1e6,
            ..Default::default()
        };
        let scan = thomas_scan(&h, &[1.0, 0.0], 0.5, &[5.0, 10.0], &opts).unwrap();
        assert_eq!(scan.flagged(), vec![5.0, 10.0]);
        assert!(scan.to_csv().starts_with("rho,sigma_min_H,sigma_min_precond,fitted_C,T_rho_norm\n"));
    }

    #[test]
    fn rho_list_must_ascend() {
        let lat = Lattice::new(2, 2).unwrap();
        let h = MagneticHamiltonian::free(&lat);
        for bad in [&[10.0, 5.0][..], &[0.0, 1.0], &[]] {
            assert!(thomas_scan(&h, &[1.0, 0.0], 0.5, bad, &ScanOptions::default()).is_err());
        }
    }
}
