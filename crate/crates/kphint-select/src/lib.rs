//! Subset-selection strategies over per-configuration rollout counts.
//!
//! All comparisons run on exact integer correct-count totals over the shared
//! denominator; tolerances are converted to count units once. Ties break the
//! same way everywhere: fewest KPs, then lexicographically smallest index
//! list. Strategies that enumerate new candidates (constrained search,
//! exhaustive) evaluate them through the store's single-flight provider
//! interface at the table's own runs x samples budget.

mod basic;
mod batch;
mod cbrs;
mod css;
mod error;
mod exhaustive;
mod phi;
mod view;

pub use basic::{derive_seed, select_all, select_max_score, select_none, select_random};
pub use batch::{
    batch_select, select_one, summarize, BatchReport, SelectParams, SelectionFailure,
    SelectionSummary,
};
pub use cbrs::{select_cbrs, ConsensusReport, TieBreakPath, DEFAULT_DELTA};
pub use css::{select_css, CssPartition, DEFAULT_ENUMERATION_CAP};
pub use error::{SelectError, SelectResult};
pub use exhaustive::{select_exhaustive, DEFAULT_EXHAUSTIVE_CAP};
pub use phi::{select_phi, PhiMode, PhiParams};
pub use view::LooView;
