//! Count-space view over the leave-one-out family of a table.
//!
//! All strategy comparisons happen on integer total-correct counts over the
//! shared denominator, so equal accuracies compare equal with no float
//! rounding. Tolerances are converted into count units once.

use crate::error::SelectResult;
use kphint_core::{AccuracyTable, Configuration};
use std::cmp::Ordering;

/// Totals for the empty set, the full set, and every leave-one-out subset.
pub struct LooView {
    pub n: u32,
    pub denom: u64,
    pub t_empty: u64,
    pub t_full: u64,
    /// t_loo[i] = total correct for K without index i.
    pub t_loo: Vec<u64>,
}

impl LooView {
    /// Requires every member of the leave-one-out family to be evaluated;
    /// errors list all missing configurations.
    pub fn from_table(table: &AccuracyTable) -> SelectResult<Self> {
        table.require_all(&table.loo_family())?;
        let n = table.n_kps;
        let t_empty = table.total_correct(&Configuration::empty())?;
        let t_full = table.total_correct(&Configuration::full(n))?;
        let mut t_loo = Vec::with_capacity(n as usize);
        for i in 0..n {
            t_loo.push(table.total_correct(&Configuration::leave_one_out(n, i)?)?);
        }
        Ok(LooView {
            n,
            denom: table.denominator(),
            t_empty,
            t_full,
            t_loo,
        })
    }

    pub fn accuracy(&self, total: u64) -> f64 {
        total as f64 / self.denom as f64
    }

    /// Largest leave-one-out total, None when n = 0.
    pub fn t_max(&self) -> Option<u64> {
        self.t_loo.iter().max().copied()
    }
}

/// True when the candidate beats the incumbent: higher total, or equal total
/// with fewer KPs, then lexicographically smaller indices.
pub fn beats(
    cand_total: u64,
    cand: &Configuration,
    best_total: u64,
    best: &Configuration,
) -> bool {
    cand_total > best_total
        || (cand_total == best_total && cand.selection_order(best) == Ordering::Less)
}

/// Argmax with the standard tie-break over (configuration, total) pairs.
pub fn argmax_total(
    candidates: impl IntoIterator<Item = (Configuration, u64)>,
) -> Option<(Configuration, u64)> {
    let mut best: Option<(Configuration, u64)> = None;
    for (config, total) in candidates {
        best = Some(match best {
            None => (config, total),
            Some((bc, bt)) => {
                if beats(total, &config, bt, &bc) {
                    (config, total)
                } else {
                    (bc, bt)
                }
            }
        });
    }
    best
}
