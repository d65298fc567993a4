use std::fs;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::run_experiment;
use crate::output::write_atomic;
use crate::plot;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    /// SHA-256 of the canonical resolved configuration.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputFile>,
    pub summary: Summary,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Executes the experiment and writes `<name>.csv`, `<name>.json`,
/// `<name>.svg` and finally the manifest into the output directory.
///
/// Failed checks still produce all files; the error is returned afterwards.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let started_at = now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let out = pool.install(|| run_experiment(&cfg.experiment, cfg.seed))?;

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.clone(),
        source,
    })?;
    let name = cfg.experiment.name();
    let x = out.table.column(out.plot_x).unwrap_or_default();
    let y = out.table.column(out.plot_y).unwrap_or_default();
    let files: Vec<(String, Vec<u8>)> = vec![
        (format!("{name}.csv"), out.table.to_csv()),
        (
            format!("{name}.json"),
            serde_json::to_vec_pretty(&out.json).expect("report serialises"),
        ),
        (
            format!("{name}.svg"),
            plot::render(&x, &y, out.plot_x, out.plot_y).into_bytes(),
        ),
    ];
    let mut outputs = Vec::new();
    for (file, bytes) in &files {
        write_atomic(&dir.join(file), bytes)?;
        outputs.push(OutputFile {
            path: file.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
    }

    let canonical = cfg.canonical();
    let manifest = RunManifest {
        experiment: name.to_string(),
        config_hash: sha256_hex(&serde_json::to_vec(&canonical).expect("serialisable")),
        config: canonical,
        version: fourier_lab::VERSION.to_string(),
        seed: cfg.seed,
        workers: cfg.workers,
        started_at,
        finished_at: now(),
        outputs,
        summary: Summary {
            pass: out.failures.is_empty(),
            checks: out.checks,
            failures: out.failures.clone(),
        },
    };
    write_manifest(dir, &manifest)?;
    if out.failures.is_empty() {
        Ok(manifest)
    } else {
        Err(CliError::CheckFailed(out.failures.join("; ")))
    }
}

fn write_manifest(dir: &Path, m: &RunManifest) -> Result<(), CliError> {
    let bytes = serde_json::to_vec_pretty(m).expect("manifest serialises");
    write_atomic(&dir.join(MANIFEST_FILE), &bytes)
}
