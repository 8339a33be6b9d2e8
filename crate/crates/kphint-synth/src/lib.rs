//! Synthetic rollout provider with known ground truth.
//!
//! Worlds model a configuration's success probability as a logistic function
//! of main effects plus pairwise interactions, which is enough to express
//! both a dominant critical hint and the pruning interaction paradox
//! (positive singles, negative pair). Everything is deterministic given the
//! seed, so selectors and analyzers can be verified desk-scale without an
//! LLM.

mod error;
mod generate;
mod provider;
mod sample;
mod truth;
mod world;

pub use error::{SynthError, SynthResult};
pub use generate::{generate_benchmark, Benchmark, GeneratorParams};
pub use provider::{SynthProvider, ThresholdHintProvider, ThresholdSpec};
pub use sample::{sample_rollouts, SampleMode};
pub use truth::{all_configurations, ground_truth_best, quantized_best};
pub use world::{sigma, PairEffect, SyntheticWorld};
