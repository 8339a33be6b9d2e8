//! Overlap between two strategies' selections.

use crate::error::{AnalysisError, AnalysisResult};
use kphint_core::Configuration;
use kphint_store::SelectionRecord;
use std::collections::BTreeMap;

/// Mean per-problem Jaccard similarity |A intersect B| / |A union B| of two
/// selection sets, with two empty selections counting as 1. Both inputs
/// must cover exactly the same problem ids; within one input the last
/// record per problem wins.
pub fn strategy_jaccard(
    selections_a: &[SelectionRecord],
    selections_b: &[SelectionRecord],
) -> AnalysisResult<f64> {
    let a = by_problem(selections_a);
    let b = by_problem(selections_b);
    let only_a: Vec<String> = a.keys().filter(|k| !b.contains_key(*k)).map(|k| k.to_string()).collect();
    let only_b: Vec<String> = b.keys().filter(|k| !a.contains_key(*k)).map(|k| k.to_string()).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(AnalysisError::IdMismatch { only_a, only_b });
    }
    if a.is_empty() {
        return Err(AnalysisError::EmptyInput { what: "selections" });
    }
    let sum: f64 = a
        .iter()
        .map(|(id, config_a)| pair_jaccard(config_a, b[id]))
        .sum();
    Ok(sum / a.len() as f64)
}

fn by_problem(selections: &[SelectionRecord]) -> BTreeMap<&str, &Configuration> {
    selections
        .iter()
        .map(|s| (s.problem_id.as_str(), &s.selected))
        .collect()
}

fn pair_jaccard(a: &Configuration, b: &Configuration) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let intersection = a.indices().iter().filter(|i| b.contains(**i)).count();
    let union = a.indices().len() + b.indices().len() - intersection;
    intersection as f64 / union as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use kphint_core::Strategy;
    use proptest::prelude::*;

    fn record(id: &str, indices: &[u32], strategy: Strategy) -> SelectionRecord {
        SelectionRecord {
            problem_id: id.into(),
            strategy,
            selected: Configuration::canonicalize(indices, 16).unwrap(),
            est_accuracy: None,
            evaluations_requested: 0,
            notes: String::new(),
        }
    }

    fn set(id: &str, indices: &[u32]) -> SelectionRecord {
        record(id, indices, Strategy::Css)
    }

    #[test]
    fn identical_selections_score_one() {
        let a = vec![set("p1", &[0, 2]), set("p2", &[])];
        let b = vec![set("p1", &[0, 2]), set("p2", &[])];
        assert_eq!(strategy_jaccard(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_nonempty_selections_score_zero() {
        let a = vec![set("p1", &[0, 1])];
        let b = vec![set("p1", &[2, 3])];
        assert_eq!(strategy_jaccard(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn partial_overlap_follows_the_formula() {
        let a = vec![set("p1", &[1, 2])];
        let b = vec![set("p1", &[2, 3])];
        let j = strategy_jaccard(&a, &b).unwrap();
        assert!((j - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn per_problem_scores_average() {
        let a = vec![set("p1", &[1, 2]), set("p2", &[5])];
        let b = vec![set("p1", &[2, 3]), set("p2", &[5])];
        let j = strategy_jaccard(&a, &b).unwrap();
        assert!((j - (1.0 / 3.0 + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_vs_nonempty_scores_zero() {
        let a = vec![set("p1", &[])];
        let b = vec![set("p1", &[4])];
        assert_eq!(strategy_jaccard(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn id_mismatch_lists_the_symmetric_difference() {
        let a = vec![set("p1", &[0]), set("p2", &[0])];
        let b = vec![set("p2", &[0]), set("p3", &[0])];
        match strategy_jaccard(&a, &b).unwrap_err() {
            AnalysisError::IdMismatch { only_a, only_b } => {
                assert_eq!(only_a, vec!["p1"]);
                assert_eq!(only_b, vec!["p3"]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(
            strategy_jaccard(&[], &[]),
            Err(AnalysisError::EmptyInput { .. })
        ));
    }

    proptest! {
        #[test]
        fn jaccard_is_symmetric(
            sets_a in proptest::collection::vec(proptest::collection::btree_set(0u32..8, 0..5), 1..6),
            sets_b in proptest::collection::vec(proptest::collection::btree_set(0u32..8, 0..5), 1..6),
        ) {
            let n = sets_a.len().min(sets_b.len());
            let a: Vec<SelectionRecord> = sets_a[..n].iter().enumerate()
                .map(|(i, s)| set(&format!("p{i}"), &s.iter().copied().collect::<Vec<_>>()))
                .collect();
            let b: Vec<SelectionRecord> = sets_b[..n].iter().enumerate()
                .map(|(i, s)| set(&format!("p{i}"), &s.iter().copied().collect::<Vec<_>>()))
                .collect();
            let ab = strategy_jaccard(&a, &b).unwrap();
            let ba = strategy_jaccard(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&ab));
            // Score 1 exactly when every per-problem pair is equal.
            let all_equal = sets_a[..n] == sets_b[..n];
            prop_assert_eq!(ab == 1.0, all_equal);
        }
    }
}
