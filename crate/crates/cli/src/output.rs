//! Artifacts of a run: `report.json`, `tables/*.csv` and `manifest.json`.
//!
//! The report carries no timestamp, so identical runs give identical
//! reports; the timestamp lives in the manifest.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use levy_rinv_core::CheckReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::experiments::{Outcome, Table};

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub experiment: &'a str,
    pub anchor: &'a str,
    pub description: &'a str,
    pub seed: u64,
    pub passed: bool,
    pub checks: &'a [CheckReport],
    pub notes: &'a [String],
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub version: &'static str,
    pub config_sha256: String,
    pub created_unix: u64,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn report_json(cfg: &ExperimentConfig, outcome: &Outcome) -> String {
    let entry = cfg.experiment.entry();
    let report = Report {
        experiment: entry.name.as_str(),
        anchor: entry.anchor,
        description: entry.description,
        seed: cfg.seed,
        passed: outcome.passed(),
        checks: &outcome.checks,
        notes: &outcome.notes,
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}

fn write_table(dir: &Path, table: &Table) -> anyhow::Result<()> {
    let path = dir.join(format!("{}.csv", table.name));
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_artifacts(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome) -> anyhow::Result<()> {
    let tables = dir.join("tables");
    fs::create_dir_all(&tables).with_context(|| format!("creating {}", tables.display()))?;
    fs::write(dir.join("report.json"), report_json(cfg, outcome))?;
    for t in &outcome.tables {
        write_table(&tables, t)?;
    }
    let manifest = Manifest {
        experiment: cfg.experiment.to_string(),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(cfg),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}
