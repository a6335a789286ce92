//! Artifact writing and the run manifest.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const OUTPUT_DIR_ENV: &str = "UWLAB_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "uwlab-out";

/// Output directory: flag, then config, then environment, then `./uwlab-out`.
pub fn resolve_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Writes artifacts into one directory and records their hashes.
pub struct Output {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
    started: Instant,
}

impl Output {
    pub fn create(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Output {
            dir,
            artifacts: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, data).with_context(|| format!("cannot write {}", path.display()))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            bytes: data.len(),
            sha256: hex::encode(Sha256::digest(data)),
        });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes a buffer filled by `fill`, for the core's CSV writers.
    pub fn with<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> urysohn::Result<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write(name, &buf)
    }

    /// Serializes `rows` as CSV with a header from the row fields.
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for r in rows {
            writer.serialize(r)?;
        }
        let buf = writer.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.write(name, &buf)
    }

    /// Writes `manifest.json` last; it is the only artifact that varies between runs.
    pub fn finish(mut self, command: &str, config: Option<(&Path, &str)>, seed: Option<u64>, pass: bool) -> Result<()> {
        let manifest = Manifest {
            tool: "uwlab",
            version: env!("CARGO_PKG_VERSION"),
            library_version: urysohn::VERSION,
            command: command.to_string(),
            config_path: config.map(|c| c.0.display().to_string()),
            config_sha256: config.map(|c| c.1.to_string()),
            seed,
            pass,
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64() - self.started.elapsed().as_secs_f64())
                .unwrap_or(0.0),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            artifacts: std::mem::take(&mut self.artifacts),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    command: String,
    config_path: Option<String>,
    config_sha256: Option<String>,
    seed: Option<u64>,
    pass: bool,
    started_unix: f64,
    wall_clock_seconds: f64,
    artifacts: Vec<Artifact>,
}
