//! Diagnostics over evaluated rollout data: interaction-paradox rates,
//! difficulty buckets, correct-count distributions, selection overlap,
//! and solution-prefix sweeps.

mod buckets;
mod distribution;
mod error;
mod jaccard;
mod paradox;
mod prefix;

pub use buckets::{default_edges, difficulty_buckets, BucketReport, BucketStats, QUANTILE_POINTS};
pub use distribution::{correct_count_distribution, CountDistribution, RunMode};
pub use error::{AnalysisError, AnalysisResult};
pub use jaccard::strategy_jaccard;
pub use paradox::{
    paradox_stats, positive_contribution_set, ParadoxPair, ParadoxReport, ProblemParadoxSummary,
};
pub use prefix::{prefix_hint, prefix_sweep, PrefixPoint};
