use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::Serialize;

use crate::Cli;

/// Version of every CSV layout this tool writes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Everything needed to replay a run; written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config_path: Option<String>,
    pub config_text: Option<String>,
    pub seed: u64,
    pub out_dir: String,
    pub threads: Option<usize>,
    pub version: &'static str,
    pub csv_schema_version: u32,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    /// Wall-clock measurements, kept here so the outputs stay reproducible.
    pub timing: serde_json::Map<String, serde_json::Value>,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

impl RunManifest {
    pub fn start(cli: &Cli) -> Self {
        let command = match &cli.command {
            crate::Command::Codec(_) => "codec",
            crate::Command::Pathfind(_) => "pathfind",
            crate::Command::Simulate(_) => "simulate",
            crate::Command::Analyze(_) => "analyze",
        };
        RunManifest {
            command: command.into(),
            argv: std::env::args().collect(),
            config_path: None,
            config_text: None,
            seed: cli.seed,
            out_dir: cli.out.display().to_string(),
            threads: cli.threads,
            version: env!("CARGO_PKG_VERSION"),
            csv_schema_version: CSV_SCHEMA_VERSION,
            started_unix: now(),
            finished_unix: 0.0,
            outputs: Vec::new(),
            warnings: Vec::new(),
            timing: serde_json::Map::new(),
        }
    }

    /// Write `contents` to `dir/name` and record it.
    pub fn write(&mut self, dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, dir: &Path) -> anyhow::Result<()> {
        self.finished_unix = now();
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(dir.join("manifest.json"), text + "\n").context("writing manifest.json")
    }
}

/// Serialize rows with a header into CSV text.
pub fn csv_text<S: Serialize>(rows: &[S]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
