//! Dataset-wide selection with a per-strategy summary.

use crate::basic::{derive_seed, select_all, select_max_score, select_none, select_random};
use crate::cbrs::select_cbrs;
use crate::css::select_css;
use crate::error::{SelectError, SelectResult};
use crate::exhaustive::select_exhaustive;
use crate::phi::{select_phi, PhiMode, PhiParams};
use kphint_core::{SelectionOutcome, Strategy};
use kphint_store::{RolloutProvider, Store};
use serde::{Deserialize, Serialize};

/// Knobs shared by every strategy in a batch run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectParams {
    /// Tolerance for the tolerant leave-one-out strategy (strict always
    /// uses 0).
    pub epsilon: f64,
    pub phi_mode: PhiMode,
    pub delta: f64,
    pub enumeration_cap: u32,
    pub exhaustive_cap: u32,
    pub seed: u64,
}

impl Default for SelectParams {
    fn default() -> Self {
        SelectParams {
            epsilon: 1.0 / 32.0,
            phi_mode: PhiMode::PruneTolerated,
            delta: crate::cbrs::DEFAULT_DELTA,
            enumeration_cap: crate::css::DEFAULT_ENUMERATION_CAP,
            exhaustive_cap: crate::exhaustive::DEFAULT_EXHAUSTIVE_CAP,
            seed: 0,
        }
    }
}

/// One failed problem in a batch run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionFailure {
    pub problem_id: String,
    pub error: String,
}

/// Aggregate line for the summary report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub strategy: Strategy,
    pub problems: u64,
    pub failures: u64,
    pub avg_kp: f64,
    pub avg_accuracy: Option<f64>,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub outcomes: Vec<SelectionOutcome>,
    pub failures: Vec<SelectionFailure>,
    pub summary: SelectionSummary,
}

/// Runs one strategy for one problem. Strategies that only read the table
/// still go through the store so est_accuracy can be filled on demand for
/// winners that were never directly evaluated.
pub fn select_one(
    store: &Store,
    problem_id: &str,
    strategy: Strategy,
    params: &SelectParams,
    provider: &dyn RolloutProvider,
) -> SelectResult<SelectionOutcome> {
    let table = || {
        store
            .table(problem_id)
            .ok_or_else(|| SelectError::MissingTable {
                problem_id: problem_id.to_string(),
            })
    };
    let mut outcome = match strategy {
        Strategy::None => select_none(&table()?)?,
        Strategy::All => select_all(&table()?)?,
        Strategy::Random => {
            select_random(&table()?, derive_seed(params.seed, problem_id))?
        }
        Strategy::MaxScore => select_max_score(&table()?)?,
        Strategy::SLoo => select_phi(
            &table()?,
            &PhiParams::strict().with_mode(params.phi_mode),
        )?,
        Strategy::TLoo => select_phi(
            &table()?,
            &PhiParams::new(params.epsilon)?.with_mode(params.phi_mode),
        )?,
        Strategy::Css => select_css(store, problem_id, provider, params.enumeration_cap)?,
        Strategy::Cbrs => select_cbrs(&table()?, params.delta)?,
        Strategy::Exhaustive => {
            select_exhaustive(store, problem_id, provider, params.exhaustive_cap)?
        }
    };
    if outcome.est_accuracy.is_none() {
        if store.counts(problem_id, &outcome.selected).is_none() {
            outcome.evaluations_requested += 1;
        }
        if let Ok(counts) = store.fetch_or_request(problem_id, &outcome.selected, provider) {
            let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
            outcome.est_accuracy = Some(total as f64 / store.denominator() as f64);
        } else {
            outcome.evaluations_requested = outcome.evaluations_requested.saturating_sub(1);
        }
    }
    Ok(outcome)
}

/// Runs one strategy over every problem in the store, in id order.
/// Per-problem errors become failure records; the summary covers successes
/// only.
pub fn batch_select(
    store: &Store,
    strategy: Strategy,
    params: &SelectParams,
    provider: &dyn RolloutProvider,
) -> BatchReport {
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for problem_id in store.problem_ids() {
        match select_one(store, &problem_id, strategy, params, provider) {
            Ok(outcome) => outcomes.push(outcome),
            Err(err) => failures.push(SelectionFailure {
                problem_id,
                error: err.to_string(),
            }),
        }
    }
    let summary = summarize(strategy, &outcomes, failures.len() as u64);
    BatchReport {
        outcomes,
        failures,
        summary,
    }
}

pub fn summarize(
    strategy: Strategy,
    outcomes: &[SelectionOutcome],
    failures: u64,
) -> SelectionSummary {
    let problems = outcomes.len() as u64;
    let avg_kp = if outcomes.is_empty() {
        0.0
    } else {
        outcomes.iter().map(|o| o.selected.len() as f64).sum::<f64>() / problems as f64
    };
    let accuracies: Vec<f64> = outcomes.iter().filter_map(|o| o.est_accuracy).collect();
    let avg_accuracy = if accuracies.is_empty() {
        None
    } else {
        Some(accuracies.iter().sum::<f64>() / accuracies.len() as f64)
    };
    let evaluations = outcomes.iter().map(|o| o.evaluations_requested).sum();
    SelectionSummary {
        strategy,
        problems,
        failures,
        avg_kp,
        avg_accuracy,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::seed_problem;
    use kphint_core::Configuration;
    use kphint_store::CacheOnly;

    fn three_problem_store() -> Store {
        let store = Store::new(4, 25).unwrap();
        for (idx, n) in [5u32, 6, 7].iter().enumerate() {
            let id = format!("p{idx}");
            seed_problem(&store, &id, *n);
            store
                .insert_counts(&id, &Configuration::empty(), vec![10; 4])
                .unwrap();
            store
                .insert_counts(&id, &Configuration::full(*n), vec![15; 4])
                .unwrap();
        }
        store
    }

    #[test]
    fn none_summary_has_zero_avg_kp() {
        let store = three_problem_store();
        let report = batch_select(&store, Strategy::None, &SelectParams::default(), &CacheOnly);
        assert_eq!(report.failures.len(), 0);
        assert_eq!(report.summary.avg_kp, 0.0);
        assert_eq!(report.summary.problems, 3);
        let avg = report.summary.avg_accuracy.unwrap();
        assert!((avg - 0.4).abs() < 1e-12);
    }

    #[test]
    fn all_summary_averages_kp_counts() {
        let store = three_problem_store();
        let report = batch_select(&store, Strategy::All, &SelectParams::default(), &CacheOnly);
        assert_eq!(report.summary.avg_kp, 6.0);
        let avg = report.summary.avg_accuracy.unwrap();
        assert!((avg - 0.6).abs() < 1e-12);
    }

    #[test]
    fn failures_are_collected_not_fatal() {
        let store = three_problem_store();
        // Max-score needs the leave-one-out cells, which are absent.
        let report = batch_select(
            &store,
            Strategy::MaxScore,
            &SelectParams::default(),
            &CacheOnly,
        );
        assert_eq!(report.outcomes.len(), 0);
        assert_eq!(report.failures.len(), 3);
        assert_eq!(report.summary.failures, 3);
        assert!(report.failures[0].error.contains("not evaluated"));
    }

    #[test]
    fn outcomes_are_ordered_by_problem_id() {
        let store = three_problem_store();
        let report = batch_select(&store, Strategy::None, &SelectParams::default(), &CacheOnly);
        let ids: Vec<&str> = report.outcomes.iter().map(|o| o.problem_id.as_str()).collect();
        assert_eq!(ids, vec!["p0", "p1", "p2"]);
    }
}
