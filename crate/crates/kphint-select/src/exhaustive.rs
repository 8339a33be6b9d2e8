//! Small-n exhaustive search: the verification oracle.

use crate::error::{SelectError, SelectResult};
use crate::view::beats;
use kphint_core::{Configuration, SelectionOutcome, Strategy};
use kphint_store::{RolloutProvider, Store};

pub const DEFAULT_EXHAUSTIVE_CAP: u32 = 12;

/// Argmax of pooled accuracy over all 2^n subsets with the standard
/// tie-break, evaluating unseen configurations through the provider.
pub fn select_exhaustive(
    store: &Store,
    problem_id: &str,
    provider: &dyn RolloutProvider,
    cap: u32,
) -> SelectResult<SelectionOutcome> {
    let table = store
        .table(problem_id)
        .ok_or_else(|| SelectError::MissingTable {
            problem_id: problem_id.to_string(),
        })?;
    let n = table.n_kps;
    if n > cap {
        return Err(SelectError::ExhaustiveCapExceeded { n_kps: n, cap });
    }
    let denom = table.denominator();
    let mut evaluations_requested = 0u64;
    let mut best: Option<(Configuration, u64)> = None;
    for mask in 0u64..(1u64 << n) {
        let indices: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let config = Configuration::from_sorted(indices);
        if store.counts(problem_id, &config).is_none() {
            evaluations_requested += 1;
        }
        let counts = store.fetch_or_request(problem_id, &config, provider)?;
        let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
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
    let (selected, total) = best.expect("the empty set is always enumerated");
    Ok(SelectionOutcome {
        problem_id: problem_id.to_string(),
        strategy: Strategy::Exhaustive,
        selected,
        est_accuracy: Some(total as f64 / denom as f64),
        evaluations_requested,
        notes: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{scripted_provider, store_with_totals};
    use kphint_store::CacheOnly;

    #[test]
    fn single_kp_prefers_the_better_cell() {
        let store = store_with_totals("p1", 1, 4, 25, &[(&[], 30), (&[0], 70)]);
        let out = select_exhaustive(&store, "p1", &CacheOnly, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(out.selected.indices(), &[0]);
        assert_eq!(out.est_accuracy, Some(0.7));
        assert_eq!(out.evaluations_requested, 0);
    }

    #[test]
    fn requests_unseen_subsets() {
        let store = store_with_totals("p1", 2, 4, 25, &[(&[], 30), (&[0, 1], 50)]);
        let provider = scripted_provider(4, 25, &[(&[0], 80), (&[1], 20)]);
        let out = select_exhaustive(&store, "p1", &provider, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(out.selected.indices(), &[0]);
        assert_eq!(out.est_accuracy, Some(0.8));
        assert_eq!(out.evaluations_requested, 2);
    }

    #[test]
    fn cap_is_enforced() {
        let cells: Vec<(Vec<u32>, u64)> = vec![(vec![], 1), ((0..13).collect(), 1)];
        let refs: Vec<(&[u32], u64)> = cells.iter().map(|(v, t)| (v.as_slice(), *t)).collect();
        let store = store_with_totals("p1", 13, 1, 10, &refs);
        match select_exhaustive(&store, "p1", &CacheOnly, DEFAULT_EXHAUSTIVE_CAP).unwrap_err() {
            SelectError::ExhaustiveCapExceeded { n_kps, cap } => {
                assert_eq!(n_kps, 13);
                assert_eq!(cap, 12);
            }
            other => panic!("expected ExhaustiveCapExceeded, got {other:?}"),
        }
    }
}
