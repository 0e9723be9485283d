//! Artifact writers. Every JSON report embeds the config hash; wall-clock data
//! goes only to `run_meta.json`.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// JSON document shape shared by every report.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config_hash: &'a str,
    config: &'a RunConfig,
    results: &'a T,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub label: String,
    pub seconds: f64,
    pub budget_s: Option<f64>,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    config_hash: &'a str,
    subcommand: &'a str,
    version: &'a str,
    started_unix_s: f64,
    elapsed_s: f64,
    files: &'a [String],
    timings: &'a [Timing],
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    body.push('\n');
    Ok(body)
}

pub struct OutputDir {
    root: PathBuf,
    hash: String,
    cfg: RunConfig,
    started: Instant,
    started_unix: f64,
    files: Vec<String>,
    pub timings: Vec<Timing>,
}

impl OutputDir {
    pub fn create(root: &Path, cfg: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::Output(format!("{}: {e}", root.display())))?;
        let mut out = OutputDir {
            root: root.to_path_buf(),
            hash: cfg.hash(),
            cfg: cfg.clone(),
            started: Instant::now(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            files: Vec::new(),
            timings: Vec::new(),
        };
        out.text("config.toml", &cfg.to_toml())?;
        Ok(out)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.path(name);
        std::fs::write(&path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.files.push(name.into());
        Ok(())
    }

    /// Pretty JSON wrapped with the config hash and the resolved config.
    pub fn report<T: Serialize>(&mut self, name: &str, results: &T) -> Result<(), CliError> {
        let body = to_json(&Envelope {
            config_hash: &self.hash,
            config: &self.cfg,
            results,
        })?;
        self.text(name, &body)
    }

    /// Pretty JSON written as is; the value must carry the hash itself.
    pub fn raw_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let body = to_json(value)?;
        self.text(name, &body)
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.files.push(name.into());
        Ok(())
    }

    /// CSV with an explicit header and numeric rows.
    pub fn csv_table(&mut self, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        self.files.push(name.into());
        Ok(())
    }

    /// Write `run_meta.json`, the only artifact with timestamps.
    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        let mut files = self.files.clone();
        files.push("run_meta.json".into());
        let meta = RunMeta {
            config_hash: &self.hash,
            subcommand: &self.cfg.subcommand,
            version: env!("CARGO_PKG_VERSION"),
            started_unix_s: self.started_unix,
            elapsed_s: self.started.elapsed().as_secs_f64(),
            files: &files,
            timings: &self.timings,
        };
        let body = to_json(&meta)?;
        let path = self.path("run_meta.json");
        std::fs::write(&path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.files = files;
        Ok(self.root)
    }
}
