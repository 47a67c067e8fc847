//! Run manifest and atomic publication of the output directory.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fns_core::Verdict;

use crate::config::ExperimentConfig;
use crate::experiments::{Artifact, Check};

pub const MANIFEST_NAME: &str = "manifest.ini";
pub const SUMMARY_NAME: &str = "summary.txt";

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

/// Record of one run, written next to its artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub config: Vec<String>,
    /// `(file name, size in bytes)`; the summary and manifest are included.
    pub artifacts: Vec<(String, usize)>,
    pub checks: Vec<Check>,
    pub stages: Vec<(String, f64)>,
    /// Set when a module error aborted the run.
    pub error: Option<String>,
    pub exit_code: i32,
}

impl RunManifest {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            version: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            config: cfg.echo(),
            artifacts: Vec::new(),
            checks: Vec::new(),
            stages: Vec::new(),
            error: None,
            exit_code: exit::SUCCESS,
        }
    }

    /// FAIL if any check failed, otherwise INCONCLUSIVE if any check was,
    /// otherwise PASS.
    pub fn overall(&self) -> Verdict {
        let has = |v| self.checks.iter().any(|c| c.verdict == v);
        if has(Verdict::Fail) {
            Verdict::Fail
        } else if has(Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn status(&self) -> String {
        match &self.error {
            Some(_) => "ERROR".to_string(),
            None => self.overall().to_string(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "status = {}", self.status());
        let _ = writeln!(s, "exit_code = {}", self.exit_code);
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error = {}", e.replace('\n', " "));
        }
        let _ = writeln!(s, "\n[config]");
        for line in &self.config {
            let _ = writeln!(s, "{line}");
        }
        let _ = writeln!(s, "\n[artifacts]");
        for (name, size) in &self.artifacts {
            let _ = writeln!(s, "{name} = {size}");
        }
        let _ = writeln!(s, "\n[verdicts]");
        for c in &self.checks {
            let _ = writeln!(s, "{} = {}", c.name, c.verdict);
        }
        let _ = writeln!(s, "\n[timings]");
        for (stage, secs) in &self.stages {
            let _ = writeln!(s, "{stage} = {secs:.3}");
        }
        s
    }

    /// Human summary: one line per check with its detail.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", c.verdict, c.name, c.detail.replace('\n', "\n    "));
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "ERROR {e}");
        }
        let _ = writeln!(s, "overall: {}", self.status());
        s
    }
}

/// Refuses to publish into a directory that already holds files.
pub fn check_target(dir: &Path) -> io::Result<()> {
    if dir.exists() {
        if !dir.is_dir() {
            return Err(io::Error::new(
                io::ErrorKind::AlreadyExists,
                format!("{} exists and is not a directory", dir.display()),
            ));
        }
        if fs::read_dir(dir)?.next().is_some() {
            return Err(io::Error::new(
                io::ErrorKind::AlreadyExists,
                format!("output directory {} is not empty", dir.display()),
            ));
        }
    }
    Ok(())
}

fn staging_path(dir: &Path) -> PathBuf {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    let parent = dir.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    parent.join(format!(".{name}.staging-{}", std::process::id()))
}

/// Writes the artifacts, summary and manifest into a staging directory and
/// renames it onto `dir`, so readers never observe a partial run.
pub fn publish(dir: &Path, artifacts: &[Artifact], manifest: &mut RunManifest) -> io::Result<()> {
    check_target(dir)?;
    if let Some(parent) = dir.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let staging = staging_path(dir);
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir(&staging)?;
    let result = (|| {
        manifest.artifacts.clear();
        for a in artifacts {
            fs::write(staging.join(&a.name), &a.bytes)?;
            manifest.artifacts.push((a.name.clone(), a.bytes.len()));
        }
        let summary = manifest.summary();
        fs::write(staging.join(SUMMARY_NAME), &summary)?;
        manifest.artifacts.push((SUMMARY_NAME.into(), summary.len()));
        // the manifest lists itself without a size
        manifest.artifacts.push((MANIFEST_NAME.into(), 0));
        fs::write(staging.join(MANIFEST_NAME), manifest.render())?;
        if dir.exists() {
            fs::remove_dir(dir)?;
        }
        fs::rename(&staging, dir)
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}
