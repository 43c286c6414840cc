use std::ffi::c_char;
use std::path::Path;

use torus_spectral::cli::{run, ExperimentConfig};

use crate::error::{guard, str_arg, Failure, TsStatus};

/// Runs the experiment in `config_path` (TOML config or manifest.json)
/// into `out_dir`, exactly as the command-line tool does.
#[no_mangle]
pub unsafe extern "C" fn ts_run_config(config_path: *const c_char, out_dir: *const c_char) -> TsStatus {
    guard(|| {
        let config = ExperimentConfig::load(Path::new(str_arg(config_path)?))?;
        run(&config, Path::new(str_arg(out_dir)?))
            .map(|_| ())
            .map_err(|e| Failure(TsStatus::from(&e.error), e.to_string()))
    })
}
