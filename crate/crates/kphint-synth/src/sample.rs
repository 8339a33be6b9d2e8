//! Deterministic rollout sampling.
//!
//! Sampled mode draws counter-based Bernoulli variates keyed on
//! (seed, problem_id, config, run, sample), so evaluation order and thread
//! count never change results. Exact mode bypasses sampling entirely and
//! reports round(p * samples_per_run) per run for noise-free tests.

use crate::error::SynthResult;
use crate::world::SyntheticWorld;
use kphint_core::Configuration;

/// How rollout counts are produced from a world's true probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Exact,
    Sampled,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key(seed: u64, problem_id: &str, config: &Configuration, run: u32, sample: u32) -> u64 {
    let mut h = splitmix64(seed ^ 0xA076_1D64_78BD_642F);
    for byte in problem_id.as_bytes() {
        h = splitmix64(h ^ u64::from(*byte));
    }
    h = splitmix64(h ^ 0xE703_7ED1_A0B4_28DB);
    for &i in config.indices() {
        h = splitmix64(h ^ (u64::from(i) + 1));
    }
    splitmix64(h ^ (u64::from(run) << 32) ^ u64::from(sample))
}

fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Per-run correct counts for `config` under the given mode.
pub fn sample_rollouts(
    world: &SyntheticWorld,
    config: &Configuration,
    runs: u32,
    samples_per_run: u32,
    mode: SampleMode,
) -> SynthResult<Vec<u32>> {
    let p = world.true_probability(config)?;
    match mode {
        SampleMode::Exact => {
            let count = (p * f64::from(samples_per_run)).round() as u32;
            Ok(vec![count.min(samples_per_run); runs as usize])
        }
        SampleMode::Sampled => {
            let mut counts = Vec::with_capacity(runs as usize);
            for run in 0..runs {
                let mut correct = 0;
                for sample in 0..samples_per_run {
                    let h = key(world.seed, &world.problem_id, config, run, sample);
                    if unit_f64(h) < p {
                        correct += 1;
                    }
                }
                counts.push(correct);
            }
            Ok(counts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::PairEffect;
    use proptest::prelude::*;

    fn world(base: f64) -> SyntheticWorld {
        SyntheticWorld::new("w", base, vec![1.0, -0.5], vec![], 7).unwrap()
    }

    #[test]
    fn saturated_probability_fills_every_run() {
        let sure = world(30.0);
        let counts =
            sample_rollouts(&sure, &Configuration::empty(), 8, 32, SampleMode::Sampled).unwrap();
        assert_eq!(counts, vec![32; 8]);
        let counts =
            sample_rollouts(&sure, &Configuration::empty(), 8, 32, SampleMode::Exact).unwrap();
        assert_eq!(counts, vec![32; 8]);
    }

    #[test]
    fn impossible_probability_yields_zero_counts() {
        let never = world(-30.0);
        let counts =
            sample_rollouts(&never, &Configuration::empty(), 8, 32, SampleMode::Sampled).unwrap();
        assert_eq!(counts, vec![0; 8]);
    }

    #[test]
    fn fair_world_pools_near_half() {
        let fair = world(0.0);
        let counts =
            sample_rollouts(&fair, &Configuration::empty(), 8, 32, SampleMode::Sampled).unwrap();
        let pooled = f64::from(counts.iter().sum::<u32>()) / 256.0;
        assert!((pooled - 0.5).abs() < 0.09, "pooled {pooled}");
    }

    #[test]
    fn exact_mode_rounds_true_probability() {
        let world = SyntheticWorld::new(
            "w",
            0.0,
            vec![1.0, 1.0],
            vec![PairEffect { i: 0, j: 1, w: -3.0 }],
            0,
        )
        .unwrap();
        let counts =
            sample_rollouts(&world, &Configuration::full(2), 8, 32, SampleMode::Exact).unwrap();
        // sigma(-1) * 32 = 8.606 rounds to 9.
        assert_eq!(counts, vec![9; 8]);
    }

    proptest! {
        #[test]
        fn sampling_is_deterministic(base in -3.0f64..3.0, seed in any::<u64>()) {
            let world = SyntheticWorld::new("w", base, vec![0.4], vec![], seed).unwrap();
            let config = Configuration::canonicalize(&[0], 1).unwrap();
            let a = sample_rollouts(&world, &config, 4, 16, SampleMode::Sampled).unwrap();
            let b = sample_rollouts(&world, &config, 4, 16, SampleMode::Sampled).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn exact_mode_is_identical_across_runs(base in -3.0f64..3.0) {
            let world = SyntheticWorld::new("w", base, vec![], vec![], 0).unwrap();
            let counts =
                sample_rollouts(&world, &Configuration::empty(), 8, 32, SampleMode::Exact).unwrap();
            prop_assert!(counts.windows(2).all(|w| w[0] == w[1]));
            prop_assert!(counts[0] <= 32);
        }
    }
}
