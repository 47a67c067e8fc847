//! Batch front end for the fractional Navier–Stokes laboratory.
//!
//! A run reads one INI-style configuration, dispatches the named study and
//! publishes its CSV files, a human summary and a manifest into a fresh
//! output directory.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use fns_core::{Error, Verdict};

pub use config::{parse_config, ConfigError, ConfigErrors, ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, Artifact, Check, Outcome};
pub use output::{exit, RunManifest};

/// Exit status for a module error: numerical breakdowns are aborts, the
/// rest are problems with the requested setup.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Blowup { .. }
        | Error::NotConverged { .. }
        | Error::QuadratureNotConverged(_)
        | Error::UnresolvedDerivative { .. } => exit::NUMERICAL,
        _ => exit::USAGE,
    }
}

/// Command-line overrides of the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, ov: &Overrides) {
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &ov.output {
        cfg.output_dir = Some(out.clone());
    }
}

/// `runs/<kind>-seed<seed>` unless the configuration names a directory.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| Path::new("runs").join(format!("{}-seed{}", cfg.kind, cfg.seed)))
}

/// Runs the experiment and publishes its directory. A module error keeps
/// no CSV files: the directory then holds only the summary and a manifest
/// recording the error.
pub fn run(cfg: &ExperimentConfig) -> std::io::Result<(RunManifest, PathBuf)> {
    let dir = output_dir(cfg);
    output::check_target(&dir)?;
    let mut manifest = RunManifest::new(cfg);
    let artifacts = match run_experiment(cfg) {
        Ok(outcome) => {
            manifest.checks = outcome.checks;
            manifest.stages = outcome.stages;
            manifest.exit_code = match manifest.overall() {
                Verdict::Fail => exit::FAIL,
                _ => exit::SUCCESS,
            };
            outcome.artifacts
        }
        Err(e) => {
            manifest.exit_code = exit_code_for(&e);
            manifest.error = Some(e.to_string());
            Vec::new()
        }
    };
    output::publish(&dir, &artifacts, &mut manifest)?;
    Ok((manifest, dir))
}
