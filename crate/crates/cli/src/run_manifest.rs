use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};
use texbench_core::fsutil;

#[derive(Debug, Serialize)]
pub struct InputHash {
    pub path: PathBuf,
    /// Hex SHA-256, or `None` if the file could not be read.
    pub sha256: Option<String>,
}

/// Provenance for one CLI invocation, written once the run has finished.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    pub config: serde_json::Value,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub inputs: Vec<InputHash>,
    pub outputs: Vec<PathBuf>,
    pub errors: Vec<String>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn hash_file(path: &Path) -> Option<String> {
    let bytes = std::fs::read(path).ok()?;
    Some(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn start(subcommand: &'static str, config: impl Serialize) -> Self {
        Self {
            tool_version: texbench_core::TOOL_VERSION,
            subcommand,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            started_at: now(),
            finished_at: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn hash_inputs<'a>(&mut self, paths: impl IntoIterator<Item = &'a Path>) {
        for p in paths {
            self.inputs.push(InputHash {
                path: p.to_path_buf(),
                sha256: hash_file(p),
            });
        }
    }

    pub fn finish(mut self, path: &Path) -> texbench_core::Result<()> {
        self.finished_at = Some(now());
        fsutil::write_json_atomic(path, &self)
    }
}
