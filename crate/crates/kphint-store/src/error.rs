use kphint_core::{Configuration, CoreError};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: duplicate id `{id}` conflicts with an earlier record")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error("problem `{problem_id}`: knowledge point indices are not contiguous from 0: {detail}")]
    KpIndexGap { problem_id: String, detail: String },

    #[error("problem `{problem_id}` config {config} run {run}: incomplete run (expected {expected} samples, found {found})")]
    IncompleteRun {
        problem_id: String,
        config: Configuration,
        run: u32,
        expected: u32,
        found: u32,
    },

    #[error("problem `{problem_id}` config {config} run {run} sample {sample}: duplicate rollout record")]
    DuplicateRecord {
        problem_id: String,
        config: Configuration,
        run: u32,
        sample: u32,
    },

    #[error("problem `{problem_id}` config {config}: run {run} out of range (runs = {runs})")]
    RunOutOfRange {
        problem_id: String,
        config: Configuration,
        run: u32,
        runs: u32,
    },

    #[error("problem `{problem_id}` config {config} run {run}: sample {sample} out of range (samples_per_run = {samples_per_run})")]
    SampleOutOfRange {
        problem_id: String,
        config: Configuration,
        run: u32,
        sample: u32,
        samples_per_run: u32,
    },

    #[error("unknown problem `{problem_id}`")]
    UnknownProblem { problem_id: String },

    #[error("problem `{problem_id}` config {config}: conflicting counts for an existing cell")]
    CellConflict {
        problem_id: String,
        config: Configuration,
    },

    #[error("record geometry mismatch: expected {expected_runs} runs of {expected_samples} samples, got {got_runs} runs of {got_samples}")]
    GeometryMismatch {
        expected_runs: u32,
        expected_samples: u32,
        got_runs: u32,
        got_samples: u32,
    },

    #[error("provider returned a malformed result for problem `{problem_id}` config {config}: {message}")]
    ProviderContract {
        problem_id: String,
        config: Configuration,
        message: String,
    },

    #[error("provider failure for problem `{problem_id}` config {config}: {message}")]
    ProviderFailure {
        problem_id: String,
        config: Configuration,
        message: String,
    },
}

pub type StoreResult<T> = Result<T, StoreError>;
