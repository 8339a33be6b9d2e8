//! Data-directory layout, store loading, and failure reports.

use crate::config::CliConfig;
use anyhow::{Context, Result};
use kphint_store::{write_records, HeaderRecord, SelectionRecord, Store};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// One per-problem failure in a machine-readable report file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub problem_id: String,
    pub error: String,
}

pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(config: &CliConfig) -> Result<Self> {
        std::fs::create_dir_all(&config.data_dir)
            .with_context(|| format!("creating data dir {}", config.data_dir.display()))?;
        Ok(DataDir {
            root: config.data_dir.clone(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn problems(&self) -> PathBuf {
        self.path("problems.jsonl")
    }

    pub fn kps(&self) -> PathBuf {
        self.path("kps.jsonl")
    }

    pub fn rollouts(&self) -> PathBuf {
        self.path("rollouts.jsonl")
    }

    pub fn raw_rollouts(&self) -> PathBuf {
        self.path("raw_rollouts.jsonl")
    }

    pub fn worlds(&self) -> PathBuf {
        self.path("worlds.jsonl")
    }

    pub fn transcript(&self) -> PathBuf {
        self.path("transcript.jsonl")
    }

    pub fn selections(&self, strategy: &str) -> PathBuf {
        self.path(&format!("selections-{strategy}.jsonl"))
    }

    /// Loads whatever state files already exist.
    pub fn open_store(&self, config: &CliConfig) -> Result<Store> {
        let store = Store::new(config.runs, config.samples_per_run)?;
        if self.problems().exists() {
            store.ingest_problems(&self.problems())?;
        }
        if self.kps().exists() {
            store.ingest_kps(&self.kps())?;
        }
        if self.rollouts().exists() {
            store.ingest_rollouts(&self.rollouts())?;
        }
        if self.raw_rollouts().exists() {
            store.ingest_raw_rollouts(&self.raw_rollouts())?;
        }
        Ok(store)
    }
}

/// Writes a failure report (empty file removed) and returns the exit code:
/// 0 for no failures, 1 otherwise.
pub fn report_failures(path: &Path, header: &HeaderRecord, failures: &[FailureRecord]) -> Result<i32> {
    if failures.is_empty() {
        if path.exists() {
            std::fs::remove_file(path)
                .with_context(|| format!("removing stale report {}", path.display()))?;
        }
        return Ok(0);
    }
    write_records(path, Some(header), failures.iter().cloned())?;
    eprintln!("{} problem(s) failed; report at {}", failures.len(), path.display());
    Ok(1)
}

/// Loads a selections file written by `select`.
pub fn read_selections(path: &Path) -> Result<Vec<SelectionRecord>> {
    let records: Vec<(usize, SelectionRecord)> = kphint_store::read_records(path)?;
    Ok(records.into_iter().map(|(_, r)| r).collect())
}
