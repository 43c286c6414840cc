use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, ExperimentKind, GaugeConfig, MatrixGaugeConfig, PotentialSpec, ThomasConfig};
use crate::bloch::{brillouin_grid, compute_bands, detect_flat_bands};
use crate::dbar::{gauge_matrix, gauge_scalar, select_plane, split_and_gauge, GaugeResult, GaugeVerdict, IterationRecord, MatrixGaugeOptions, PlaneChoice};
use crate::fourier::literal::format_field;
use crate::fourier::{Lattice, PeriodicField, Rank, SobolevReport};
use crate::operator::MagneticHamiltonian;
use crate::thomas::{build_cover, thomas_scan, zero_set, ParametrixOptions, ScanOptions};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub stage: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

/// A failed stage together with the error it raised.
#[derive(Debug)]
pub struct RunError {
    pub stage: &'static str,
    pub error: Error,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for RunError {}

trait Stage<T> {
    fn stage(self, name: &'static str) -> std::result::Result<T, RunError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, name: &'static str) -> std::result::Result<T, RunError> {
        self.map_err(|error| RunError { stage: name, error })
    }
}

struct Writer<'a> {
    dir: &'a Path,
    outputs: Vec<OutputRecord>,
}

impl Writer<'_> {
    fn write(&mut self, stage: &str, file: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(file), contents)?;
        self.outputs.push(OutputRecord {
            stage: stage.to_string(),
            file: file.to_string(),
            sha256: format!("{:x}", Sha256::digest(contents.as_bytes())),
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, stage: &str, file: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Backend(e.to_string()))?;
        text.push('\n');
        self.write(stage, file, &text)
    }
}

/// Validates `config`, runs the experiment into `out` and writes the
/// manifest last.
pub fn run(config: &ExperimentConfig, out: &Path) -> std::result::Result<RunManifest, RunError> {
    let start = Instant::now();
    let warnings = config.validate().stage("config")?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(out).map_err(Error::from).stage("output")?;
    let lattice = Lattice::new(config.lattice.d, config.lattice.n).stage("lattice")?;
    let mut writer = Writer {
        dir: out,
        outputs: Vec::new(),
    };
    match config.kind {
        ExperimentKind::Bands => run_bands(config, &lattice, &mut writer)?,
        ExperimentKind::Thomas => run_thomas(config, &lattice, &mut writer)?,
        ExperimentKind::Cover => run_cover(config, &lattice, &mut writer)?,
        ExperimentKind::Gauge => run_gauge(config, &lattice, &mut writer)?,
        ExperimentKind::MatrixGauge => run_matrix_gauge(config, &lattice, &mut writer)?,
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: config.kind,
        config: config.clone(),
        warnings,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs: writer.outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Backend(e.to_string()))
        .stage("manifest")?;
    text.push('\n');
    std::fs::write(out.join(MANIFEST_FILE), text).map_err(Error::from).stage("manifest")?;
    Ok(manifest)
}

fn potential(spec: &Option<PotentialSpec>, lattice: &Lattice, rank: Rank, seed: u64) -> Result<Option<PeriodicField>> {
    spec.as_ref().map(|s| super::preset_potential(s, lattice, rank, seed)).transpose()
}

fn hamiltonian(config: &ExperimentConfig, lattice: &Lattice) -> Result<MagneticHamiltonian> {
    let p = &config.potentials;
    let a = potential(&p.a, lattice, Rank::Vector, config.seed)?;
    // the electric potential draws from a different stream than A
    let v = potential(&p.v, lattice, Rank::Scalar, config.seed.wrapping_add(1))?;
    MagneticHamiltonian::new(lattice, a, v)
}

fn run_bands(config: &ExperimentConfig, lattice: &Lattice, w: &mut Writer) -> std::result::Result<(), RunError> {
    let b = config.bands.as_ref().expect("validated");
    let h = hamiltonian(config, lattice).stage("potentials")?;
    let grid = brillouin_grid(lattice.dim(), b.grid);
    let table = compute_bands(&h, &grid, b.count).stage("bands")?;
    w.write("bands", "bands.csv", &table.to_csv()).stage("bands")?;
    let flat = detect_flat_bands(&table, b.flat_tol).stage("flat-bands")?;
    w.json("flat-bands", "flat_bands.json", &flat).stage("flat-bands")
}

fn run_thomas(config: &ExperimentConfig, lattice: &Lattice, w: &mut Writer) -> std::result::Result<(), RunError> {
    let q = config.quasimomentum.as_ref().expect("validated");
    let t = config.thomas.clone().unwrap_or_default();
    let h = hamiltonian(config, lattice).stage("potentials")?;
    let options = ScanOptions {
        floor: t.floor,
        method: t.method,
        parametrix: t.parametrix.then(|| parametrix_options(&t)),
    };
    let scan = thomas_scan(&h, &q.direction(lattice.dim()), q.beta, &q.rho, &options).stage("scan")?;
    for rho in scan.flagged() {
        eprintln!("warning: σ_min(H(k)Λ_ρ⁻¹) below the floor {} at ρ = {rho}", t.floor);
    }
    w.write("scan", "scan.csv", &scan.to_csv()).stage("scan")?;
    w.json("scan", "scan.json", &scan).stage("scan")
}

fn parametrix_options(t: &ThomasConfig) -> ParametrixOptions {
    ParametrixOptions {
        delta: t.delta,
        thickness: t.thickness,
        near: t.near,
        neumann_order: t.neumann_order,
        method: t.method,
    }
}

fn run_cover(config: &ExperimentConfig, lattice: &Lattice, w: &mut Writer) -> std::result::Result<(), RunError> {
    let q = config.quasimomentum.as_ref().expect("validated");
    let t = config.thomas.clone().unwrap_or_default();
    let d = lattice.dim();
    let e = q.direction(d);
    let axes = |prefix: &str| (1..=d).map(|i| format!("{prefix}_{i}")).collect::<Vec<_>>().join(",");
    let mut zeros = format!("rho,set,{}\n", axes("m"));
    let mut tiles = format!("rho,patch,class,{},{},psi_size,phi_size\n", axes("lo"), axes("hi"));
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    for &rho in &q.rho {
        let slab = zero_set(rho, q.beta, &e, lattice, t.thickness).stage("zero-set")?;
        for (name, set) in [("exact", &slab.exact), ("near", &slab.near)] {
            for m in set {
                let _ = writeln!(zeros, "{rho:.16e},{name},{}", join(m));
            }
        }
        let cover = build_cover(rho, t.delta, lattice, &slab).stage("cover")?;
        for (j, p) in cover.patches.iter().enumerate() {
            let _ = writeln!(
                tiles,
                "{rho:.16e},{j},{},{},{},{},{}",
                p.class.as_str(),
                join(&p.lo),
                join(&p.hi),
                p.psi.len(),
                p.phi.len()
            );
        }
    }
    w.write("zero-set", "zero_set.csv", &zeros).stage("zero-set")?;
    w.write("cover", "cover.csv", &tiles).stage("cover")
}

#[derive(Serialize)]
struct GaugeReport<'a> {
    verdict: GaugeVerdict,
    obstruction: Vec<[f64; 2]>,
    residual: Option<f64>,
    margin: Option<f64>,
    trace: &'a [IterationRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    remainder_norms: Option<[SobolevReport; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plane: Option<PlaneChoice>,
}

fn write_gauge(
    w: &mut Writer,
    result: &GaugeResult,
    remainder_norms: Option<[SobolevReport; 2]>,
    plane: Option<PlaneChoice>,
) -> Result<()> {
    let report = GaugeReport {
        verdict: result.verdict,
        obstruction: result.obstruction.iter().map(|z| [z.re, z.im]).collect(),
        residual: result.residual,
        margin: result.margin,
        trace: &result.trace,
        remainder_norms,
        plane,
    };
    w.json("gauge", "gauge.json", &report)?;
    if let Some(f) = &result.f {
        w.write("gauge", "f.field", &format_field(f))?;
    }
    if let Some(h) = &result.h {
        w.write("gauge", "h.field", &format_field(h))?;
    }
    Ok(())
}

fn run_gauge(config: &ExperimentConfig, lattice: &Lattice, w: &mut Writer) -> std::result::Result<(), RunError> {
    let opts = config.gauge.clone().unwrap_or_else(GaugeConfig::default);
    let g = potential(&config.potentials.g, lattice, Rank::Scalar, config.seed)
        .stage("potentials")?
        .expect("validated");
    let plane = match opts.plane_bound {
        Some(bound) => {
            let a = potential(&config.potentials.a, lattice, Rank::Vector, config.seed)
                .stage("potentials")?
                .expect("validated");
            Some(select_plane(&a, bound).stage("plane")?)
        }
        None => None,
    };
    let (result, remainder) = match opts.split {
        Some(m) => {
            let s = split_and_gauge(&g, m, opts.tol).stage("gauge")?;
            (s.gauge, Some(s.remainder_norms))
        }
        None => (gauge_scalar(&g, opts.tol).stage("gauge")?, None),
    };
    write_gauge(w, &result, remainder, plane).stage("gauge")
}

fn run_matrix_gauge(config: &ExperimentConfig, lattice: &Lattice, w: &mut Writer) -> std::result::Result<(), RunError> {
    let opts = config.matrix_gauge.clone().unwrap_or_else(MatrixGaugeConfig::default);
    let g = potential(&config.potentials.g, lattice, Rank::Matrix(opts.q), config.seed)
        .stage("potentials")?
        .expect("validated");
    let result = gauge_matrix(
        &g,
        &MatrixGaugeOptions {
            max_iterations: opts.max_iterations,
            tol: opts.tol,
            damping: opts.damping,
        },
    )
    .stage("matrix-gauge")?;
    write_gauge(w, &result, None, None).stage("matrix-gauge")
}
