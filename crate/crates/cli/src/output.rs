//! Atomic file output and run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use copyro::config::RunConfig;

use crate::CliError;

/// Write `contents` to a temporary file next to `path`, then rename it over
/// `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| CliError::User(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents)
        .and_then(|_| tmp.flush())
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::User(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to repeat a run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub argv: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub inputs: Vec<InputFile>,
    pub outputs: Vec<String>,
    pub details: BTreeMap<String, serde_json::Value>,
    pub duration_seconds: f64,
}

pub struct Run {
    command: String,
    config: RunConfig,
    inputs: Vec<InputFile>,
    outputs: Vec<PathBuf>,
    details: BTreeMap<String, serde_json::Value>,
    started: Instant,
}

impl Run {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Run {
            command: command.to_string(),
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(InputFile {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("detail serialises"),
        );
    }

    pub fn write(&mut self, path: &Path, contents: &[u8]) -> Result<(), CliError> {
        write_atomic(path, contents)?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Write `<output>.manifest.json` beside every output.
    pub fn finish(self) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            argv: std::env::args().collect(),
            config: self.config.resolved().into_iter().collect(),
            seed: self.config.seed,
            inputs: self.inputs,
            outputs: self
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            details: self.details,
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serialises");
        json.push(b'\n');
        for out in &self.outputs {
            let mut name = out.as_os_str().to_owned();
            name.push(".manifest.json");
            write_atomic(Path::new(&name), &json)?;
        }
        Ok(())
    }
}
