//! In-memory store with flat-file ingestion, cached evaluation, and
//! write-through persistence of provider results.

use crate::aggregate::aggregate;
use crate::error::{StoreError, StoreResult};
use crate::jsonl::{read_records, to_line, write_records};
use crate::provider::RolloutProvider;
use crate::schema::{AggregatedRolloutRecord, HeaderRecord, KpRecord, ProblemRecord, RolloutRecord};
use kphint_core::{AccuracyTable, Configuration, CoreError, KnowledgePoint, Problem};
use once_cell::sync::OnceCell;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

type CellKey = (String, Configuration);

#[derive(Default)]
struct Inner {
    problems: BTreeMap<String, Problem>,
    kps: BTreeMap<String, Vec<KnowledgePoint>>,
    tables: BTreeMap<String, AccuracyTable>,
}

/// Hub for problems, knowledge points, and rollout counts.
///
/// Reads are concurrent; writes are serialized. `fetch_or_request` is
/// single-flight: concurrent requests for the same (problem, configuration)
/// trigger at most one provider call, and provider results are appended to
/// the write-through log (when configured) before being returned.
pub struct Store {
    runs: u32,
    samples_per_run: u32,
    inner: RwLock<Inner>,
    inflight: Mutex<HashMap<CellKey, Arc<OnceCell<Vec<u32>>>>>,
    provider_calls: AtomicU64,
    write_through: Mutex<Option<(PathBuf, File)>>,
    ingested: Mutex<HashSet<[u8; 32]>>,
}

impl Store {
    pub fn new(runs: u32, samples_per_run: u32) -> Result<Self, CoreError> {
        if runs == 0 {
            return Err(CoreError::ZeroParameter { field: "runs" });
        }
        if samples_per_run == 0 {
            return Err(CoreError::ZeroParameter {
                field: "samples_per_run",
            });
        }
        Ok(Store {
            runs,
            samples_per_run,
            inner: RwLock::new(Inner::default()),
            inflight: Mutex::new(HashMap::new()),
            provider_calls: AtomicU64::new(0),
            write_through: Mutex::new(None),
            ingested: Mutex::new(HashSet::new()),
        })
    }

    pub fn runs(&self) -> u32 {
        self.runs
    }

    pub fn samples_per_run(&self) -> u32 {
        self.samples_per_run
    }

    pub fn denominator(&self) -> u64 {
        self.runs as u64 * self.samples_per_run as u64
    }

    /// Number of provider invocations made through `fetch_or_request`.
    pub fn provider_invocations(&self) -> u64 {
        self.provider_calls.load(Ordering::SeqCst)
    }

    fn file_hash(path: &Path) -> StoreResult<[u8; 32]> {
        let bytes = std::fs::read(path).map_err(|e| StoreError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let digest = Sha256::digest(&bytes);
        let mut hash = [0u8; 32];
        hash.copy_from_slice(&digest);
        Ok(hash)
    }

    /// Returns true when this exact content was ingested before (no-op).
    fn already_ingested(&self, hash: [u8; 32]) -> bool {
        !self.ingested.lock().unwrap().insert(hash)
    }

    // ---- ingestion -------------------------------------------------------

    /// Loads a problems file. Returns the number of records loaded, or 0 when
    /// the identical content was already ingested.
    pub fn ingest_problems(&self, path: &Path) -> StoreResult<usize> {
        let hash = Self::file_hash(path)?;
        if self.already_ingested(hash) {
            return Ok(0);
        }
        let records: Vec<(usize, ProblemRecord)> = read_records(path)?;
        let mut inner = self.inner.write().unwrap();
        let mut staged: BTreeMap<String, Problem> = BTreeMap::new();
        for (line, record) in &records {
            if inner.problems.contains_key(&record.id) || staged.contains_key(&record.id) {
                return Err(StoreError::DuplicateId {
                    path: path.to_path_buf(),
                    line: *line,
                    id: record.id.clone(),
                });
            }
            staged.insert(record.id.clone(), record.clone().into());
        }
        inner.problems.extend(staged);
        Ok(records.len())
    }

    /// Loads a knowledge-points file. Indices per problem must be contiguous
    /// from 0 once merged with anything already loaded.
    pub fn ingest_kps(&self, path: &Path) -> StoreResult<usize> {
        let hash = Self::file_hash(path)?;
        if self.already_ingested(hash) {
            return Ok(0);
        }
        let records: Vec<(usize, KpRecord)> = read_records(path)?;
        let mut inner = self.inner.write().unwrap();
        let mut staged: BTreeMap<String, BTreeMap<u32, KnowledgePoint>> = BTreeMap::new();
        for (problem_id, existing) in &inner.kps {
            let entry = staged.entry(problem_id.clone()).or_default();
            for kp in existing {
                entry.insert(kp.index, kp.clone());
            }
        }
        for (line, record) in &records {
            let entry = staged.entry(record.problem_id.clone()).or_default();
            if entry.contains_key(&record.index) {
                return Err(StoreError::DuplicateId {
                    path: path.to_path_buf(),
                    line: *line,
                    id: format!("{}#{}", record.problem_id, record.index),
                });
            }
            entry.insert(record.index, record.clone().into());
        }
        for (problem_id, by_index) in &staged {
            let indices: Vec<u32> = by_index.keys().copied().collect();
            let contiguous = indices.iter().enumerate().all(|(i, &idx)| idx == i as u32);
            if !contiguous {
                return Err(StoreError::KpIndexGap {
                    problem_id: problem_id.clone(),
                    detail: format!("found indices {indices:?}"),
                });
            }
        }
        inner.kps = staged
            .into_iter()
            .map(|(id, by_index)| (id, by_index.into_values().collect()))
            .collect();
        Ok(records.len())
    }

    /// Loads an aggregated rollouts file.
    pub fn ingest_rollouts(&self, path: &Path) -> StoreResult<usize> {
        let hash = Self::file_hash(path)?;
        if self.already_ingested(hash) {
            return Ok(0);
        }
        let records: Vec<(usize, AggregatedRolloutRecord)> = read_records(path)?;
        let mut inner = self.inner.write().unwrap();
        for (_, record) in &records {
            self.stage_cell(
                &mut inner,
                &record.problem_id,
                &record.config,
                record.run_counts.clone(),
                record.samples_per_run,
            )?;
        }
        Ok(records.len())
    }

    /// Loads a raw per-sample rollouts file, aggregating complete runs.
    pub fn ingest_raw_rollouts(&self, path: &Path) -> StoreResult<usize> {
        let hash = Self::file_hash(path)?;
        if self.already_ingested(hash) {
            return Ok(0);
        }
        let records: Vec<(usize, RolloutRecord)> = read_records(path)?;
        let raw: Vec<RolloutRecord> = records.into_iter().map(|(_, r)| r).collect();
        let mut inner = self.inner.write().unwrap();
        let tables = {
            let kps = &inner.kps;
            aggregate(&raw, self.runs, self.samples_per_run, |id| {
                kps.get(id).map(|v| v.len() as u32)
            })?
        };
        for (problem_id, table) in tables {
            for (config, counts) in table.cells() {
                self.stage_cell(
                    &mut inner,
                    &problem_id,
                    config,
                    counts.to_vec(),
                    self.samples_per_run,
                )?;
            }
        }
        Ok(raw.len())
    }

    /// Inserts one cell under the write lock. Identical re-inserts are
    /// no-ops; conflicting counts for an existing cell are errors.
    fn stage_cell(
        &self,
        inner: &mut Inner,
        problem_id: &str,
        config: &Configuration,
        counts: Vec<u32>,
        samples_per_run: u32,
    ) -> StoreResult<()> {
        if samples_per_run != self.samples_per_run || counts.len() != self.runs as usize {
            return Err(StoreError::GeometryMismatch {
                expected_runs: self.runs,
                expected_samples: self.samples_per_run,
                got_runs: counts.len() as u32,
                got_samples: samples_per_run,
            });
        }
        let kp_known = inner.kps.contains_key(problem_id);
        let needed = config.indices().last().map_or(0, |&i| i + 1);
        if !inner.tables.contains_key(problem_id) {
            let n_kps = inner
                .kps
                .get(problem_id)
                .map_or(needed, |v| v.len() as u32);
            let table =
                AccuracyTable::new(problem_id.to_string(), n_kps, self.runs, self.samples_per_run)?;
            inner.tables.insert(problem_id.to_string(), table);
        }
        let table = inner.tables.get_mut(problem_id).unwrap();
        if let Some(existing) = table.counts(config) {
            if existing == counts.as_slice() {
                return Ok(());
            }
            return Err(StoreError::CellConflict {
                problem_id: problem_id.to_string(),
                config: config.clone(),
            });
        }
        if !kp_known && needed > table.n_kps {
            table.n_kps = needed;
        }
        table.insert_cell(config.clone(), counts)?;
        Ok(())
    }

    // ---- direct access ---------------------------------------------------

    pub fn problem(&self, id: &str) -> Option<Problem> {
        self.inner.read().unwrap().problems.get(id).cloned()
    }

    /// All problems in id order.
    pub fn problems(&self) -> Vec<Problem> {
        self.inner.read().unwrap().problems.values().cloned().collect()
    }

    pub fn problem_ids(&self) -> Vec<String> {
        self.inner.read().unwrap().problems.keys().cloned().collect()
    }

    pub fn kps(&self, problem_id: &str) -> Vec<KnowledgePoint> {
        self.inner
            .read()
            .unwrap()
            .kps
            .get(problem_id)
            .cloned()
            .unwrap_or_default()
    }

    pub fn kp_count(&self, problem_id: &str) -> Option<u32> {
        self.inner
            .read()
            .unwrap()
            .kps
            .get(problem_id)
            .map(|v| v.len() as u32)
    }

    pub fn put_problem(&self, problem: Problem) {
        self.inner
            .write()
            .unwrap()
            .problems
            .insert(problem.id.clone(), problem);
    }

    /// Replaces the full KP list for a problem. Indices must be contiguous
    /// from 0 and every record must carry `problem_id`.
    pub fn put_kps(&self, problem_id: &str, kps: Vec<KnowledgePoint>) -> StoreResult<()> {
        for (i, kp) in kps.iter().enumerate() {
            if kp.problem_id != problem_id || kp.index != i as u32 {
                return Err(StoreError::KpIndexGap {
                    problem_id: problem_id.to_string(),
                    detail: format!(
                        "entry {i} has problem_id `{}` index {}",
                        kp.problem_id, kp.index
                    ),
                });
            }
        }
        self.inner
            .write()
            .unwrap()
            .kps
            .insert(problem_id.to_string(), kps);
        Ok(())
    }

    /// Snapshot of one problem's accuracy table. Problems with registered
    /// KPs but no measurements yet get an empty table; `None` means the
    /// problem's KP count is unknown.
    pub fn table(&self, problem_id: &str) -> Option<AccuracyTable> {
        let inner = self.inner.read().unwrap();
        if let Some(table) = inner.tables.get(problem_id) {
            return Some(table.clone());
        }
        inner.kps.get(problem_id).map(|kps| {
            AccuracyTable::new(problem_id, kps.len() as u32, self.runs, self.samples_per_run)
                .expect("store geometry is validated at construction")
        })
    }

    pub fn counts(&self, problem_id: &str, config: &Configuration) -> Option<Vec<u32>> {
        self.inner
            .read()
            .unwrap()
            .tables
            .get(problem_id)
            .and_then(|t| t.counts(config).map(|c| c.to_vec()))
    }

    // ---- evaluation ------------------------------------------------------

    /// Returns cached counts or asks the provider, deduplicating concurrent
    /// requests for the same key. Successful provider results are persisted
    /// (write-through, then table) before being returned; failures are not
    /// cached, so a later call may retry.
    pub fn fetch_or_request(
        &self,
        problem_id: &str,
        config: &Configuration,
        provider: &dyn RolloutProvider,
    ) -> StoreResult<Vec<u32>> {
        if let Some(counts) = self.counts(problem_id, config) {
            return Ok(counts);
        }
        let key = (problem_id.to_string(), config.clone());
        let cell = {
            let mut inflight = self.inflight.lock().unwrap();
            inflight
                .entry(key)
                .or_insert_with(|| Arc::new(OnceCell::new()))
                .clone()
        };
        let counts = cell.get_or_try_init(|| -> StoreResult<Vec<u32>> {
            if let Some(counts) = self.counts(problem_id, config) {
                return Ok(counts);
            }
            self.provider_calls.fetch_add(1, Ordering::SeqCst);
            let counts = provider.evaluate(problem_id, config, self.runs, self.samples_per_run)?;
            if counts.len() != self.runs as usize {
                return Err(StoreError::ProviderContract {
                    problem_id: problem_id.to_string(),
                    config: config.clone(),
                    message: format!("expected {} runs, got {}", self.runs, counts.len()),
                });
            }
            if let Some(&bad) = counts.iter().find(|&&c| c > self.samples_per_run) {
                return Err(StoreError::ProviderContract {
                    problem_id: problem_id.to_string(),
                    config: config.clone(),
                    message: format!(
                        "count {bad} exceeds samples_per_run {}",
                        self.samples_per_run
                    ),
                });
            }
            self.append_write_through(problem_id, config, &counts)?;
            let mut inner = self.inner.write().unwrap();
            self.stage_cell(&mut inner, problem_id, config, counts.clone(), self.samples_per_run)?;
            Ok(counts)
        })?;
        Ok(counts.clone())
    }

    /// Manually records counts for a cell (same persistence path as
    /// provider results).
    pub fn insert_counts(
        &self,
        problem_id: &str,
        config: &Configuration,
        counts: Vec<u32>,
    ) -> StoreResult<()> {
        self.append_write_through(problem_id, config, &counts)?;
        let mut inner = self.inner.write().unwrap();
        self.stage_cell(&mut inner, problem_id, config, counts, self.samples_per_run)
    }

    // ---- persistence -----------------------------------------------------

    /// Enables the write-through log at `path`. Existing content is loaded
    /// first (so interrupted sweeps resume without re-evaluation), then new
    /// cells are appended as they are produced. Returns the number of cells
    /// loaded from the existing log.
    pub fn set_write_through(&self, path: &Path) -> StoreResult<usize> {
        let mut loaded = 0;
        if path.exists() {
            let records: Vec<(usize, AggregatedRolloutRecord)> = read_records(path)?;
            let mut inner = self.inner.write().unwrap();
            for (_, record) in &records {
                self.stage_cell(
                    &mut inner,
                    &record.problem_id,
                    &record.config,
                    record.run_counts.clone(),
                    record.samples_per_run,
                )?;
            }
            loaded = records.len();
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| StoreError::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
        *self.write_through.lock().unwrap() = Some((path.to_path_buf(), file));
        Ok(loaded)
    }

    fn append_write_through(
        &self,
        problem_id: &str,
        config: &Configuration,
        counts: &[u32],
    ) -> StoreResult<()> {
        let mut guard = self.write_through.lock().unwrap();
        if let Some((path, file)) = guard.as_mut() {
            let record = AggregatedRolloutRecord {
                problem_id: problem_id.to_string(),
                config: config.clone(),
                run_counts: counts.to_vec(),
                samples_per_run: self.samples_per_run,
            };
            file.write_all(to_line(&record).as_bytes())
                .map_err(|e| StoreError::Io {
                    path: path.clone(),
                    source: e,
                })?;
        }
        Ok(())
    }

    /// Writes all problems to `path` in id order.
    pub fn write_problems(&self, path: &Path, header: Option<&HeaderRecord>) -> StoreResult<()> {
        let records: Vec<ProblemRecord> =
            self.problems().into_iter().map(ProblemRecord::from).collect();
        write_records(path, header, records)
    }

    /// Writes all knowledge points to `path` in (problem id, index) order.
    pub fn write_kps(&self, path: &Path, header: Option<&HeaderRecord>) -> StoreResult<()> {
        let inner = self.inner.read().unwrap();
        let records: Vec<KpRecord> = inner
            .kps
            .values()
            .flatten()
            .cloned()
            .map(KpRecord::from)
            .collect();
        drop(inner);
        write_records(path, header, records)
    }

    /// Writes all aggregated cells to `path` in (problem id, config) order.
    pub fn write_rollouts(&self, path: &Path, header: Option<&HeaderRecord>) -> StoreResult<()> {
        let inner = self.inner.read().unwrap();
        let mut records = Vec::new();
        for (problem_id, table) in &inner.tables {
            for (config, counts) in table.cells() {
                records.push(AggregatedRolloutRecord {
                    problem_id: problem_id.clone(),
                    config: config.clone(),
                    run_counts: counts.to_vec(),
                    samples_per_run: self.samples_per_run,
                });
            }
        }
        drop(inner);
        write_records(path, header, records)
    }
}
