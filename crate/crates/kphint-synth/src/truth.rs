//! Brute-force ground truth over all 2^n configurations.

use crate::error::{SynthError, SynthResult};
use crate::world::SyntheticWorld;
use kphint_core::Configuration;

fn config_from_mask(mask: u32, n: u32) -> Configuration {
    let indices: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
    Configuration::from_sorted(indices)
}

/// Every configuration over `n` KPs, in mask order.
pub fn all_configurations(n: u32) -> impl Iterator<Item = Configuration> {
    (0u64..(1u64 << n)).map(move |mask| config_from_mask(mask as u32, n))
}

fn check_cap(world: &SyntheticWorld, cap: u32) -> SynthResult<()> {
    if world.n_kps > cap {
        return Err(SynthError::CapExceeded {
            n_kps: world.n_kps,
            cap,
        });
    }
    Ok(())
}

/// Argmax of true probability over all subsets; ties favor fewer KPs, then
/// the lexicographically smaller index list.
pub fn ground_truth_best(world: &SyntheticWorld, cap: u32) -> SynthResult<Configuration> {
    check_cap(world, cap)?;
    let mut best: Option<(f64, Configuration)> = None;
    for config in all_configurations(world.n_kps) {
        let p = world.true_probability(&config)?;
        best = Some(match best {
            None => (p, config),
            Some((bp, bc)) => {
                if p > bp
                    || (p == bp && config.selection_order(&bc) == std::cmp::Ordering::Less)
                {
                    (p, config)
                } else {
                    (bp, bc)
                }
            }
        });
    }
    Ok(best.expect("at least the empty configuration exists").1)
}

/// Argmax over the probabilities a noise-free evaluation at
/// `samples_per_run` granularity would observe, i.e. round(p * samples) /
/// samples. Returns the winner and whether it is a strict argmax (no other
/// subset shares its quantized value); only strictly separated worlds make
/// quantized selection comparable to `ground_truth_best`.
pub fn quantized_best(
    world: &SyntheticWorld,
    samples_per_run: u32,
    cap: u32,
) -> SynthResult<(Configuration, bool)> {
    check_cap(world, cap)?;
    let quantize =
        |p: f64| -> u32 { ((p * f64::from(samples_per_run)).round() as u32).min(samples_per_run) };
    let mut best: Option<(u32, Configuration)> = None;
    let mut tied_at_top = false;
    for config in all_configurations(world.n_kps) {
        let q = quantize(world.true_probability(&config)?);
        match &mut best {
            None => best = Some((q, config)),
            Some((bq, bc)) => {
                if q > *bq {
                    best = Some((q, config));
                    tied_at_top = false;
                } else if q == *bq {
                    tied_at_top = true;
                    if config.selection_order(bc) == std::cmp::Ordering::Less {
                        *bc = config;
                    }
                }
            }
        }
    }
    let (_, winner) = best.expect("at least the empty configuration exists");
    Ok((winner, !tied_at_top))
}
