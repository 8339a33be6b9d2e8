//! Logistic synthetic worlds: main effects plus pairwise interactions.

use crate::error::{SynthError, SynthResult};
use kphint_core::Configuration;
use serde::{Deserialize, Serialize};

/// One pairwise interaction weight, active when both `i` and `j` are in the
/// configuration. Always stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEffect {
    pub i: u32,
    pub j: u32,
    pub w: f64,
}

/// A problem with a known success model: configuration S succeeds with
/// probability sigma(base + sum of main effects in S + sum of pair effects
/// within S), sigma the logistic function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticWorld {
    pub problem_id: String,
    pub n_kps: u32,
    pub base: f64,
    pub main_effects: Vec<f64>,
    pub pair_effects: Vec<PairEffect>,
    pub seed: u64,
}

pub fn sigma(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl SyntheticWorld {
    pub fn new(
        problem_id: impl Into<String>,
        base: f64,
        main_effects: Vec<f64>,
        pair_effects: Vec<PairEffect>,
        seed: u64,
    ) -> SynthResult<Self> {
        let world = SyntheticWorld {
            problem_id: problem_id.into(),
            n_kps: main_effects.len() as u32,
            base,
            main_effects,
            pair_effects,
            seed,
        };
        world.validate()?;
        Ok(world)
    }

    pub fn validate(&self) -> SynthResult<()> {
        let invalid = |message: String| SynthError::InvalidWorld {
            problem_id: self.problem_id.clone(),
            message,
        };
        if self.main_effects.len() != self.n_kps as usize {
            return Err(invalid(format!(
                "main_effects has {} entries for n_kps {}",
                self.main_effects.len(),
                self.n_kps
            )));
        }
        if !self.base.is_finite() || self.main_effects.iter().any(|w| !w.is_finite()) {
            return Err(invalid("non-finite effect".to_string()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for pair in &self.pair_effects {
            if pair.i >= pair.j || pair.j >= self.n_kps {
                return Err(invalid(format!("pair ({}, {}) out of order or range", pair.i, pair.j)));
            }
            if !pair.w.is_finite() {
                return Err(invalid("non-finite effect".to_string()));
            }
            if !seen.insert((pair.i, pair.j)) {
                return Err(invalid(format!("duplicate pair ({}, {})", pair.i, pair.j)));
            }
        }
        Ok(())
    }

    pub fn logit(&self, config: &Configuration) -> SynthResult<f64> {
        let mut sum = self.base;
        for &i in config.indices() {
            if i >= self.n_kps {
                return Err(SynthError::Core(kphint_core::CoreError::IndexOutOfRange {
                    index: i,
                    n: self.n_kps,
                }));
            }
            sum += self.main_effects[i as usize];
        }
        for pair in &self.pair_effects {
            if config.contains(pair.i) && config.contains(pair.j) {
                sum += pair.w;
            }
        }
        Ok(sum)
    }

    /// Exact logistic success probability of a configuration.
    pub fn true_probability(&self, config: &Configuration) -> SynthResult<f64> {
        Ok(sigma(self.logit(config)?))
    }
}
