//! Persistence and ingestion layer for the KP-hint toolkit.
//!
//! Loads problems, knowledge points, and rollout records from line-delimited
//! JSON files, aggregates raw per-sample rollouts into per-run count tables,
//! and caches evaluations requested by selection strategies behind a
//! single-flight provider interface.

mod aggregate;
mod error;
mod jsonl;
mod provider;
mod schema;
mod store;

pub use aggregate::aggregate;
pub use error::{StoreError, StoreResult};
pub use jsonl::{read_records, to_line, write_records};
pub use provider::{CacheOnly, PromptAccuracyProvider, RolloutProvider};
pub use schema::{
    AggregatedRolloutRecord, EvaluationRequest, HeaderRecord, KpRecord, ProblemRecord,
    RolloutRecord, SelectionRecord,
};
pub use store::Store;
