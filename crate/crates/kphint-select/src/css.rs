//! Constrained subset search.
//!
//! From the leave-one-out family, H collects the KPs whose removal does not
//! degrade accuracy below max(A_K, A_empty); near-optimal removals N (those
//! reaching the best single-removal accuracy) are removed outright, and all
//! subsets of the remainder C = H without N are enumerated. The winner is
//! the pooled-accuracy argmax over those candidates plus the empty and full
//! sets, with unevaluated candidates fetched through the store at the
//! table's own runs x samples budget.

use crate::error::{SelectError, SelectResult};
use crate::view::{argmax_total, LooView};
use kphint_core::{Configuration, SelectionOutcome, Strategy};
use kphint_store::{RolloutProvider, Store};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const DEFAULT_ENUMERATION_CAP: u32 = 16;

/// The H / N / C split driving the candidate enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CssPartition {
    /// KPs whose removal keeps accuracy at or above max(A_K, A_empty).
    pub h: Vec<u32>,
    /// Members of `h` whose removal reaches the best single-removal
    /// accuracy; always removed.
    pub n_set: Vec<u32>,
    /// h without n_set; all of its subsets are enumerated.
    pub c: Vec<u32>,
    /// Best single-removal pooled accuracy over all KPs.
    pub a_max: f64,
}

impl CssPartition {
    /// Partition the KP indices of a complete leave-one-out view. `None`
    /// when the problem has no KPs.
    pub fn from_view(view: &LooView) -> Option<Self> {
        let t_max = view.t_max()?;
        let threshold = view.t_full.max(view.t_empty);
        let h: Vec<u32> = (0..view.n)
            .filter(|&i| view.t_loo[i as usize] >= threshold)
            .collect();
        let n_set: Vec<u32> = h
            .iter()
            .copied()
            .filter(|&i| view.t_loo[i as usize] >= t_max)
            .collect();
        let c: Vec<u32> = h.iter().copied().filter(|i| !n_set.contains(i)).collect();
        Some(CssPartition {
            h,
            n_set,
            c,
            a_max: view.accuracy(t_max),
        })
    }

    /// {K without (N union T) : T subset of C} plus the empty and full sets.
    pub fn candidates(&self, n: u32) -> BTreeSet<Configuration> {
        let full = Configuration::full(n);
        let mut out = BTreeSet::new();
        out.insert(Configuration::empty());
        out.insert(full.clone());
        for mask in 0u64..(1u64 << self.c.len()) {
            let mut removed: Vec<u32> = self.n_set.clone();
            for (bit, &idx) in self.c.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    removed.push(idx);
                }
            }
            out.insert(full.without(&removed));
        }
        out
    }
}

pub fn select_css(
    store: &Store,
    problem_id: &str,
    provider: &dyn RolloutProvider,
    enumeration_cap: u32,
) -> SelectResult<SelectionOutcome> {
    let table = store
        .table(problem_id)
        .ok_or_else(|| SelectError::MissingTable {
            problem_id: problem_id.to_string(),
        })?;
    let view = LooView::from_table(&table)?;
    if view.n == 0 {
        return Ok(crate::basic::outcome(
            &table,
            Strategy::Css,
            Configuration::empty(),
            Some(view.accuracy(view.t_empty)),
        ));
    }
    let partition = CssPartition::from_view(&view).expect("n >= 1");
    if partition.c.len() as u32 > enumeration_cap {
        return Err(SelectError::CssCapExceeded {
            size: partition.c.len() as u32,
            cap: enumeration_cap,
        });
    }

    let mut evaluations_requested = 0u64;
    let mut scored: Vec<(Configuration, u64)> = Vec::new();
    for candidate in partition.candidates(view.n) {
        if store.counts(problem_id, &candidate).is_none() {
            evaluations_requested += 1;
        }
        let counts = store.fetch_or_request(problem_id, &candidate, provider)?;
        let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        scored.push((candidate, total));
    }
    let (selected, total) = argmax_total(scored).expect("candidates include the empty set");
    let notes = serde_json::to_string(&partition).expect("partition serializes");
    Ok(SelectionOutcome {
        problem_id: problem_id.to_string(),
        strategy: Strategy::Css,
        selected,
        est_accuracy: Some(view.accuracy(total)),
        evaluations_requested,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{scripted_provider, store_with_totals};
    use kphint_core::CoreError;
    use kphint_store::StoreError;

    // Worked example: K = {0,1,2}, A_empty 0.30, A_K 0.50, removals 0.55 /
    // 0.52 / 0.45, oracle A({2}) = 0.60. H = {0,1}, A_max = 0.55, N = {0},
    // C = {1}; candidates {1,2}, {2}, empty, K; winner {2} at 0.60.
    fn worked_store() -> Store {
        store_with_totals(
            "p1",
            3,
            4,
            25,
            &[
                (&[], 30),
                (&[0, 1, 2], 50),
                (&[1, 2], 55),
                (&[0, 2], 52),
                (&[0, 1], 45),
            ],
        )
    }

    #[test]
    fn worked_example_selects_oracle_best() {
        let store = worked_store();
        let provider = scripted_provider(4, 25, &[(&[2], 60)]);
        let out = select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(out.selected.indices(), &[2]);
        assert_eq!(out.est_accuracy, Some(0.6));
        assert_eq!(out.evaluations_requested, 1);
        let partition: CssPartition = serde_json::from_str(&out.notes).unwrap();
        assert_eq!(partition.h, vec![0, 1]);
        assert_eq!(partition.n_set, vec![0]);
        assert_eq!(partition.c, vec![1]);
        assert_eq!(partition.a_max, 0.55);
    }

    #[test]
    fn winner_dominates_every_candidate() {
        let store = worked_store();
        let provider = scripted_provider(4, 25, &[(&[2], 60)]);
        let out = select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap();
        let table = store.table("p1").unwrap();
        let winner_total = table.total_correct(&out.selected).unwrap();
        let view = LooView::from_table(&table).unwrap();
        let partition = CssPartition::from_view(&view).unwrap();
        for candidate in partition.candidates(3) {
            let total = table.total_correct(&candidate).unwrap();
            assert!(winner_total >= total, "candidate {candidate} beats winner");
        }
    }

    #[test]
    fn empty_h_reduces_to_empty_versus_full() {
        // Every removal degrades: H is empty, so only the empty and full
        // sets compete.
        let store = store_with_totals(
            "p1",
            2,
            4,
            25,
            &[(&[], 30), (&[0, 1], 60), (&[1], 20), (&[0], 25)],
        );
        let provider = scripted_provider(4, 25, &[]);
        let out = select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(out.selected.indices(), &[0, 1]);
        assert_eq!(out.est_accuracy, Some(0.6));
        assert_eq!(out.evaluations_requested, 0);
        let partition: CssPartition = serde_json::from_str(&out.notes).unwrap();
        assert!(partition.h.is_empty());
    }

    #[test]
    fn zero_kps_degenerates_to_empty() {
        let store = store_with_totals("p1", 0, 4, 25, &[(&[], 40)]);
        let provider = scripted_provider(4, 25, &[]);
        let out = select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(out.selected.is_empty());
        assert_eq!(out.est_accuracy, Some(0.4));
    }

    #[test]
    fn oversized_c_is_refused() {
        // 18 KPs: every removal non-degrading, exactly one reaches the
        // maximum, so C has 17 members.
        let mut cells: Vec<(Vec<u32>, u64)> = vec![(vec![], 1), ((0..18).collect(), 1)];
        for i in 0..18u32 {
            let loo: Vec<u32> = (0..18).filter(|&j| j != i).collect();
            cells.push((loo, if i == 0 { 6 } else { 5 }));
        }
        let refs: Vec<(&[u32], u64)> = cells.iter().map(|(v, t)| (v.as_slice(), *t)).collect();
        let store = store_with_totals("p1", 18, 1, 10, &refs);
        let provider = scripted_provider(1, 10, &[]);
        match select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap_err() {
            SelectError::CssCapExceeded { size, cap } => {
                assert_eq!(size, 17);
                assert_eq!(cap, 16);
            }
            other => panic!("expected CssCapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn missing_loo_cells_are_reported() {
        let store = store_with_totals("p1", 2, 4, 25, &[(&[], 30)]);
        let provider = scripted_provider(4, 25, &[]);
        match select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap_err() {
            SelectError::Core(CoreError::NotEvaluated { configs, .. }) => {
                assert_eq!(configs.len(), 3);
            }
            other => panic!("expected NotEvaluated, got {other:?}"),
        }
    }

    #[test]
    fn provider_failure_propagates() {
        let store = worked_store();
        // Oracle lacks the {2} candidate.
        let provider = scripted_provider(4, 25, &[]);
        let err = select_css(&store, "p1", &provider, DEFAULT_ENUMERATION_CAP).unwrap_err();
        assert!(matches!(
            err,
            SelectError::Store(StoreError::ProviderFailure { .. })
        ));
    }
}
