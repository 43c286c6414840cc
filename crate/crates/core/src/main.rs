use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use torus_spectral::cli::{exit_code, run, ExperimentConfig, ExperimentKind};
use torus_spectral::Error;

#[derive(Parser)]
#[command(name = "torus-spectral", version, about = "Spectral experiments for periodic magnetic Schrödinger operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band functions over the Brillouin zone and flat-band detection.
    Bands(RunArgs),
    /// Smallest singular values along a complex quasimomentum ray.
    Thomas(RunArgs),
    /// Zero set and dual-space cover per ρ.
    Cover(RunArgs),
    /// Scalar ∂̄ gauge.
    Gauge(RunArgs),
    /// Matrix ∂̄ gauge (experimental).
    MatrixGauge(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Bands(a) => (ExperimentKind::Bands, a),
        Command::Thomas(a) => (ExperimentKind::Thomas, a),
        Command::Cover(a) => (ExperimentKind::Cover, a),
        Command::Gauge(a) => (ExperimentKind::Gauge, a),
        Command::MatrixGauge(a) => (ExperimentKind::MatrixGauge, a),
    };
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(&e, &e.to_string(), None),
    };
    if config.kind != kind {
        let e = Error::Config {
            path: "kind".into(),
            message: format!("config is a `{}` experiment, invoked as `{}`", config.kind.as_str(), kind.as_str()),
        };
        return fail(&e, &e.to_string(), Some(&config));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    match run(&config, &args.out) {
        Ok(manifest) => {
            for o in &manifest.outputs {
                println!("{}  {}", o.sha256, args.out.join(&o.file).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e.error, &e.to_string(), Some(&config)),
    }
}

fn fail(error: &Error, message: &str, config: Option<&ExperimentConfig>) -> ExitCode {
    eprintln!("error: {message}");
    if let Some(c) = config {
        eprintln!("config:\n{}", c.to_toml());
    }
    ExitCode::from(exit_code(error) as u8)
}
