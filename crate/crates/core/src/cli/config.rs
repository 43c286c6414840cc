use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bloch::FlatTolerance;
use crate::fourier::literal::parse_field;
use crate::linalg::SingularValueMethod;
use crate::thomas::{NearPolicy, NEUMANN_ORDER};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Bands,
    Thomas,
    Cover,
    Gauge,
    MatrixGauge,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Bands => "bands",
            ExperimentKind::Thomas => "thomas",
            ExperimentKind::Cover => "cover",
            ExperimentKind::Gauge => "gauge",
            ExperimentKind::MatrixGauge => "matrix-gauge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub potentials: Potentials,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasimomentum: Option<QuasimomentumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<BandsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thomas: Option<ThomasConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_gauge: Option<MatrixGaugeConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub d: usize,
    pub n: usize,
}

/// `a` is the magnetic potential, `v` the electric one, `g` the gauge
/// coefficient (scalar, or `q × q` for the matrix experiment).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potentials {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<PotentialSpec>,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// A potential given by preset name or as a field literal. `s` declares the
/// Sobolev smoothness of the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `amp·cos(2π q·x)` in one component.
    Cos {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        component: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    /// `2c·cos(2π x₁)`.
    Mathieu {
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        component: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    /// Seeded Gaussian coefficients scaled by `amp·exp(−|m|²/w)`.
    GaussDecay {
        #[serde(default = "one")]
        amp: f64,
        w: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "yes")]
        mean_zero: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    /// Vector potential `amp·cos(2π q·x)` along one axis (the last by
    /// default, so that it is transverse to the default `q = e₁`).
    #[serde(rename = "single-mode-A")]
    SingleModeA {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        component: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Inline field literal.
    Literal { text: String },
    /// Field literal read from a file, relative to the config file.
    File { path: String },
}

impl PotentialSpec {
    pub fn declared_smoothness(&self) -> Result<Option<f64>> {
        Ok(match self {
            PotentialSpec::Cos { s, .. }
            | PotentialSpec::Mathieu { s, .. }
            | PotentialSpec::GaussDecay { s, .. }
            | PotentialSpec::SingleModeA { s, .. } => *s,
            PotentialSpec::Constant { .. } => None,
            PotentialSpec::Literal { text } => parse_field(text)?.smoothness(),
            PotentialSpec::File { path } => parse_field(&std::fs::read_to_string(path)?)?.smoothness(),
        })
    }
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasimomentumConfig {
    /// Unit direction; `e₁` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    #[serde(default = "half")]
    pub beta: f64,
    #[serde(default)]
    pub rho: Vec<f64>,
}

impl QuasimomentumConfig {
    pub fn direction(&self, d: usize) -> Vec<f64> {
        self.e.clone().unwrap_or_else(|| {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        })
    }
}

fn default_flat_tol() -> FlatTolerance {
    FlatTolerance::Relative(1e-3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsConfig {
    /// Points per axis of the Brillouin-zone grid.
    pub grid: usize,
    pub count: usize,
    #[serde(default = "default_flat_tol")]
    pub flat_tol: FlatTolerance,
}

fn default_method() -> SingularValueMethod {
    SingularValueMethod::Auto
}

fn default_near() -> NearPolicy {
    NearPolicy::Direct
}

fn default_order() -> usize {
    NEUMANN_ORDER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThomasConfig {
    #[serde(default)]
    pub floor: f64,
    #[serde(default = "default_method")]
    pub method: SingularValueMethod,
    /// Also measure `‖T_ρ‖` per row.
    #[serde(default)]
    pub parametrix: bool,
    #[serde(default = "half")]
    pub delta: f64,
    #[serde(default = "one")]
    pub thickness: f64,
    #[serde(default = "default_near")]
    pub near: NearPolicy,
    #[serde(default = "default_order")]
    pub neumann_order: usize,
}

impl Default for ThomasConfig {
    fn default() -> Self {
        Self {
            floor: 0.0,
            method: default_method(),
            parametrix: false,
            delta: 0.5,
            thickness: 1.0,
            near: default_near(),
            neumann_order: NEUMANN_ORDER,
        }
    }
}

fn default_gauge_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    #[serde(default = "default_gauge_tol")]
    pub tol: f64,
    /// Gauge only the modes `0 < |m| ≤ split` and report the remainder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<f64>,
    /// Search bound for the rational plane chosen against `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_bound: Option<i64>,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        Self {
            tol: default_gauge_tol(),
            split: None,
            plane_bound: None,
        }
    }
}

fn two() -> usize {
    2
}

fn default_max_iterations() -> usize {
    200
}

fn default_matrix_tol() -> f64 {
    1e-13
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixGaugeConfig {
    #[serde(default = "two")]
    pub q: usize,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_matrix_tol")]
    pub tol: f64,
    #[serde(default = "one")]
    pub damping: f64,
}

impl Default for MatrixGaugeConfig {
    fn default() -> Self {
        Self {
            q: 2,
            max_iterations: default_max_iterations(),
            tol: default_matrix_tol(),
            damping: 1.0,
        }
    }
}

fn path_error<E: std::fmt::Display>(err: serde_path_to_error::Error<E>) -> Error {
    let path = err.path().to_string();
    Error::config(if path == "." { String::new() } else { path }, err.into_inner().to_string())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("", e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(path_error)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(path_error)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises to TOML")
    }

    /// Reads a TOML config, or a JSON run manifest (its `config` echo) when
    /// the file ends in `.json`. File-literal paths are made absolute.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let mut config = if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
            let inner = value.get("config").cloned().unwrap_or(value);
            Self::from_json(&inner.to_string())?
        } else {
            Self::from_toml(&text)?
        };
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.resolve_paths(&base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.potentials;
        for spec in [&mut p.a, &mut p.v, &mut p.g].into_iter().flatten() {
            if let PotentialSpec::File { path } = spec {
                let full = base.join(&*path);
                let full: PathBuf = std::fs::canonicalize(&full).unwrap_or(full);
                *path = full.display().to_string();
            }
        }
    }

    /// Checks ranges and required sections; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let d = self.lattice.d;
        if d == 0 {
            return Err(Error::config("lattice.d", "dimension must be at least 1"));
        }
        if let Some(q) = &self.quasimomentum {
            if let Some(e) = &q.e {
                if e.len() != d {
                    return Err(Error::config("quasimomentum.e", format!("expected {d} components, got {}", e.len())));
                }
                let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::config("quasimomentum.e", format!("|e| must be 1, got {norm}")));
                }
            }
            if !q.beta.is_finite() {
                return Err(Error::config("quasimomentum.beta", "β must be finite"));
            }
            if q.rho.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || q.rho.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("quasimomentum.rho", "ρ values must be positive and strictly ascending"));
            }
        }
        if let Some(t) = &self.thomas {
            if !(t.delta > 0.0 && t.delta < 1.0) {
                return Err(Error::config("thomas.delta", format!("δ must lie in (0, 1), got {}", t.delta)));
            }
            if !(t.thickness >= 0.0) {
                return Err(Error::config("thomas.thickness", "thickness must be ≥ 0"));
            }
        }
        let need = |present: bool, path: &str, what: &str| {
            if present {
                Ok(())
            } else {
                Err(Error::config(path, format!("{} experiments need {what}", self.kind.as_str())))
            }
        };
        let rho_given = self.quasimomentum.as_ref().is_some_and(|q| !q.rho.is_empty());
        match self.kind {
            ExperimentKind::Bands => {
                let b = self.bands.as_ref();
                need(b.is_some(), "bands", "a [bands] section")?;
                if b.is_some_and(|b| b.grid == 0 || b.count == 0) {
                    return Err(Error::config("bands", "grid and count must be at least 1"));
                }
            }
            ExperimentKind::Thomas | ExperimentKind::Cover => {
                need(rho_given, "quasimomentum.rho", "a ρ list")?;
            }
            ExperimentKind::Gauge | ExperimentKind::MatrixGauge => {
                need(self.potentials.g.is_some(), "potentials.g", "a g potential")?;
                if d != 2 {
                    return Err(Error::config("lattice.d", "gauge experiments live on the 2-torus"));
                }
                if self.gauge.as_ref().and_then(|g| g.plane_bound).is_some() {
                    need(self.potentials.a.is_some(), "potentials.a", "an A potential for the plane search")?;
                }
            }
        }
        if let Some(a) = &self.potentials.a {
            let threshold = 1.5 * d as f64 - 1.0;
            if let Some(s) = a.declared_smoothness()? {
                if s <= threshold {
                    warnings.push(format!(
                        "A declares smoothness s = {s}, at or below 3d/2 - 1 = {threshold}; the lower bound is only expected for smoother A"
                    ));
                }
            }
        }
        Ok(warnings)
    }
}
