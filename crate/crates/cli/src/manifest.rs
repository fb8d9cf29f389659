use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Where a target came from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Input {
    Image { path: PathBuf, shape: String },
    Synth { shape: String, seed: u64 },
    Raw { path: PathBuf, shape: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunTiming {
    pub name: String,
    pub iterations: usize,
    pub total_ms: f64,
    pub per_iteration_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    /// Echo of the resolved arguments.
    pub config: &'a C,
    pub inputs: Vec<Input>,
    /// Output files, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub total_ms: f64,
    pub runs: Vec<RunTiming>,
}

impl<'a, C: Serialize> RunManifest<'a, C> {
    pub fn new(command: &'static str, config: &'a C) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            total_ms: 0.0,
            runs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(MANIFEST_FILE), json + "\n")?;
        Ok(())
    }
}
