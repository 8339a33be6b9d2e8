//! Baseline strategies: empty set, full set, random subset, and the plain
//! argmax over the leave-one-out family.

use crate::error::SelectResult;
use crate::view::{argmax_total, LooView};
use kphint_core::{AccuracyTable, Configuration, SelectionOutcome, Strategy};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub(crate) fn outcome(
    table: &AccuracyTable,
    strategy: Strategy,
    selected: Configuration,
    est_accuracy: Option<f64>,
) -> SelectionOutcome {
    SelectionOutcome {
        problem_id: table.problem_id.clone(),
        strategy,
        selected,
        est_accuracy,
        evaluations_requested: 0,
        notes: String::new(),
    }
}

/// Always selects the empty set; est_accuracy is the unhinted accuracy.
pub fn select_none(table: &AccuracyTable) -> SelectResult<SelectionOutcome> {
    let empty = Configuration::empty();
    let est = table.pooled_accuracy(&empty)?;
    Ok(outcome(table, Strategy::None, empty, Some(est)))
}

/// Always selects the full KP set.
pub fn select_all(table: &AccuracyTable) -> SelectResult<SelectionOutcome> {
    let full = Configuration::full(table.n_kps);
    let est = table.pooled_accuracy(&full)?;
    Ok(outcome(table, Strategy::All, full, Some(est)))
}

/// Mixes a per-problem seed so batch runs stay deterministic regardless of
/// dataset order.
pub fn derive_seed(global_seed: u64, problem_id: &str) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut h = splitmix64(global_seed ^ 0x51_7C_C1_B7_27_22_0A_95);
    for byte in problem_id.as_bytes() {
        h = splitmix64(h ^ u64::from(*byte));
    }
    h
}

/// Uniform random subset: size 2 or 3 (each with probability 1/2, clamped to
/// n), members without replacement. est_accuracy comes from the table when
/// the drawn configuration happens to be evaluated.
pub fn select_random(table: &AccuracyTable, seed: u64) -> SelectResult<SelectionOutcome> {
    let n = table.n_kps;
    if n == 0 {
        let empty = Configuration::empty();
        let est = table.pooled_accuracy(&empty).ok();
        return Ok(outcome(table, Strategy::Random, empty, est));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = (*[2usize, 3].choose(&mut rng).expect("non-empty")).min(n as usize);
    let indices: Vec<u32> = rand::seq::index::sample(&mut rng, n as usize, size)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    let selected = Configuration::canonicalize(&indices, n)?;
    let est = table.pooled_accuracy(&selected).ok();
    Ok(outcome(table, Strategy::Random, selected, est))
}

/// Argmax of pooled accuracy over {empty, full, each leave-one-out subset},
/// ties broken toward fewer KPs then lexicographic order.
pub fn select_max_score(table: &AccuracyTable) -> SelectResult<SelectionOutcome> {
    let view = LooView::from_table(table)?;
    let mut candidates = vec![
        (Configuration::empty(), view.t_empty),
        (Configuration::full(view.n), view.t_full),
    ];
    for i in 0..view.n {
        candidates.push((
            Configuration::leave_one_out(view.n, i)?,
            view.t_loo[i as usize],
        ));
    }
    let (selected, total) = argmax_total(candidates).expect("at least two candidates");
    let est = view.accuracy(total);
    Ok(outcome(table, Strategy::MaxScore, selected, Some(est)))
}
