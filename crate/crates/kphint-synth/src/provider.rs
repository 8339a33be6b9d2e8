//! Store-facing providers backed by synthetic worlds.

use crate::sample::{sample_rollouts, SampleMode};
use crate::world::SyntheticWorld;
use kphint_core::Configuration;
use kphint_store::{PromptAccuracyProvider, RolloutProvider, StoreError, StoreResult};
use std::collections::BTreeMap;

/// Rollout provider that answers from a set of synthetic worlds.
pub struct SynthProvider {
    worlds: BTreeMap<String, SyntheticWorld>,
    mode: SampleMode,
}

impl SynthProvider {
    pub fn new(worlds: impl IntoIterator<Item = SyntheticWorld>, mode: SampleMode) -> Self {
        SynthProvider {
            worlds: worlds
                .into_iter()
                .map(|w| (w.problem_id.clone(), w))
                .collect(),
            mode,
        }
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    pub fn world(&self, problem_id: &str) -> Option<&SyntheticWorld> {
        self.worlds.get(problem_id)
    }

    pub fn worlds(&self) -> impl Iterator<Item = &SyntheticWorld> {
        self.worlds.values()
    }
}

impl RolloutProvider for SynthProvider {
    fn evaluate(
        &self,
        problem_id: &str,
        config: &Configuration,
        runs: u32,
        samples_per_run: u32,
    ) -> StoreResult<Vec<u32>> {
        let world = self
            .worlds
            .get(problem_id)
            .ok_or_else(|| StoreError::UnknownProblem {
                problem_id: problem_id.to_string(),
            })?;
        sample_rollouts(world, config, runs, samples_per_run, self.mode).map_err(|e| {
            StoreError::ProviderFailure {
                problem_id: problem_id.to_string(),
                config: config.clone(),
                message: e.to_string(),
            }
        })
    }
}

/// Accuracy profile for hint-prefix sweeps: low until the hint reaches
/// `jump_at_tokens` whitespace tokens, high from there on.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdSpec {
    pub jump_at_tokens: usize,
    pub p_low: f64,
    pub p_high: f64,
}

/// Prompt-accuracy provider with a planted critical segment per problem.
pub struct ThresholdHintProvider {
    specs: BTreeMap<String, ThresholdSpec>,
}

impl ThresholdHintProvider {
    pub fn new(specs: impl IntoIterator<Item = (String, ThresholdSpec)>) -> Self {
        ThresholdHintProvider {
            specs: specs.into_iter().collect(),
        }
    }
}

impl PromptAccuracyProvider for ThresholdHintProvider {
    fn prompt_accuracy(
        &self,
        problem_id: &str,
        _prompt: &str,
        hint_text: &str,
    ) -> StoreResult<f64> {
        let spec = self
            .specs
            .get(problem_id)
            .ok_or_else(|| StoreError::UnknownProblem {
                problem_id: problem_id.to_string(),
            })?;
        let tokens = hint_text.split_whitespace().count();
        Ok(if tokens >= spec.jump_at_tokens {
            spec.p_high
        } else {
            spec.p_low
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::PairEffect;

    fn provider(mode: SampleMode) -> SynthProvider {
        let world = SyntheticWorld::new(
            "p1",
            0.0,
            vec![1.0, 1.0],
            vec![PairEffect { i: 0, j: 1, w: -3.0 }],
            3,
        )
        .unwrap();
        SynthProvider::new([world], mode)
    }

    #[test]
    fn provider_returns_one_count_per_run_bounded_by_samples() {
        let provider = provider(SampleMode::Sampled);
        let counts = provider
            .evaluate("p1", &Configuration::full(2), 8, 32)
            .unwrap();
        assert_eq!(counts.len(), 8);
        assert!(counts.iter().all(|&c| c <= 32));
    }

    #[test]
    fn unknown_problem_is_an_error() {
        let provider = provider(SampleMode::Exact);
        assert!(matches!(
            provider.evaluate("nope", &Configuration::empty(), 8, 32),
            Err(StoreError::UnknownProblem { .. })
        ));
    }

    #[test]
    fn threshold_provider_jumps_at_planted_token() {
        let provider = ThresholdHintProvider::new([(
            "p1".to_string(),
            ThresholdSpec {
                jump_at_tokens: 4,
                p_low: 0.1,
                p_high: 0.8,
            },
        )]);
        assert_eq!(provider.prompt_accuracy("p1", "", "one two three").unwrap(), 0.1);
        assert_eq!(
            provider
                .prompt_accuracy("p1", "", "one two three four")
                .unwrap(),
            0.8
        );
        assert_eq!(provider.prompt_accuracy("p1", "", "").unwrap(), 0.1);
    }
}
