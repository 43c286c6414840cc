//! Batch experiment runner behind the `torus-spectral` binary.
//!
//! A run reads one TOML config (or a previously emitted `manifest.json`),
//! writes CSV/JSON outputs into the output directory and finishes with a
//! manifest that echoes the effective config and checksums every output.

mod config;
mod preset;
mod run;

pub use config::{
    BandsConfig, ExperimentConfig, ExperimentKind, GaugeConfig, LatticeConfig, MatrixGaugeConfig, PotentialSpec,
    Potentials, QuasimomentumConfig, ThomasConfig,
};
pub use preset::preset_potential;
pub use run::{run, OutputRecord, RunError, RunManifest, MANIFEST_FILE};

use crate::Error;

/// Process exit status for an error: 2 config, 3 numerical tolerance,
/// 4 resource budget, 1 anything else.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config { .. } | Error::Literal { .. } => 2,
        Error::Tolerance { .. } => 3,
        Error::Budget { .. } => 4,
        _ => 1,
    }
}
