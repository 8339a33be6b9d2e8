//! Shared domain types for the KP-hint curation toolkit.
//!
//! Everything downstream — persistence, selection strategies, interaction
//! analysis, the curation pipeline — speaks in terms of these types:
//! [`Problem`], [`KnowledgePoint`], the canonical [`Configuration`] of KP
//! indices, the per-run [`AccuracyTable`], and the [`SelectionOutcome`]
//! each strategy produces.
//!
//! All values are immutable after construction and safe to share across
//! threads; mutation goes through the store crate.

mod configuration;
mod error;
mod outcome;
mod problem;
mod table;

pub use configuration::Configuration;
pub use error::{CoreError, CoreResult};
pub use outcome::{SelectionOutcome, Strategy};
pub use problem::{KnowledgePoint, KpStatus, Problem};
pub use table::AccuracyTable;

/// Paper-default evaluation shape: 8 independent runs.
pub const DEFAULT_RUNS: u32 = 8;
/// Paper-default evaluation shape: 32 samples per run.
pub const DEFAULT_SAMPLES_PER_RUN: u32 = 32;
