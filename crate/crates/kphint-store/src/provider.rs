//! Provider traits: sources the store can ask for new rollouts.

use crate::error::{StoreError, StoreResult};
use kphint_core::{Configuration, CoreError};

/// Produces per-run correct counts for a (problem, configuration) pair.
///
/// Implementations must return exactly `runs` entries, each at most
/// `samples_per_run`. The store enforces this contract and invokes a provider
/// at most once per (problem, configuration).
pub trait RolloutProvider: Sync {
    fn evaluate(
        &self,
        problem_id: &str,
        config: &Configuration,
        runs: u32,
        samples_per_run: u32,
    ) -> StoreResult<Vec<u32>>;
}

/// Provider that never generates: any miss is a not-evaluated error naming
/// the missing configuration.
#[derive(Debug, Default, Clone, Copy)]
pub struct CacheOnly;

impl RolloutProvider for CacheOnly {
    fn evaluate(
        &self,
        problem_id: &str,
        config: &Configuration,
        _runs: u32,
        _samples_per_run: u32,
    ) -> StoreResult<Vec<u32>> {
        Err(StoreError::Core(CoreError::NotEvaluated {
            problem_id: problem_id.to_string(),
            configs: vec![config.clone()],
        }))
    }
}

/// Evaluates a fully rendered prompt (with an arbitrary hint text) and
/// reports pooled accuracy. Used by hint-prefix sweeps, where the hint is not
/// a KP subset and so cannot be keyed by `Configuration`.
pub trait PromptAccuracyProvider {
    fn prompt_accuracy(&self, problem_id: &str, prompt: &str, hint_text: &str) -> StoreResult<f64>;
}
