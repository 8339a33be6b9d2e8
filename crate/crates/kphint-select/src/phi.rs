//! Tolerance-based leave-one-out pruning.
//!
//! Given the leave-one-out family, the operator first checks whether the
//! empty or full set dominates outright, and otherwise removes every KP
//! whose removal keeps accuracy within epsilon of max(A_K, A_empty). With
//! epsilon = 0 only strictly non-degrading removals go; epsilon = 1/32
//! additionally tolerates a one-sample rollback.

use crate::error::{SelectError, SelectResult};
use crate::view::LooView;
use kphint_core::{AccuracyTable, Configuration, SelectionOutcome, Strategy};
use serde::{Deserialize, Serialize};

/// Which side of the removal inequality is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    /// Remove the tolerated KPs (those with A_wo_i >= max(A_K, A_empty) - eps).
    #[default]
    PruneTolerated,
    /// Audit mode: keep exactly the tolerated KPs instead. This mirrors the
    /// written formula's orientation, which prunes the KPs whose removal
    /// hurts; it is exposed for comparison, not as the default.
    KeepTolerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiParams {
    pub epsilon: f64,
    #[serde(default)]
    pub mode: PhiMode,
}

impl PhiParams {
    pub fn new(epsilon: f64) -> SelectResult<Self> {
        if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
            return Err(SelectError::InvalidEpsilon { value: epsilon });
        }
        Ok(PhiParams {
            epsilon,
            mode: PhiMode::PruneTolerated,
        })
    }

    pub fn strict() -> Self {
        PhiParams {
            epsilon: 0.0,
            mode: PhiMode::PruneTolerated,
        }
    }

    pub fn tolerant() -> Self {
        PhiParams {
            epsilon: 1.0 / 32.0,
            mode: PhiMode::PruneTolerated,
        }
    }

    pub fn with_mode(mut self, mode: PhiMode) -> Self {
        self.mode = mode;
        self
    }

    fn strategy(&self) -> Strategy {
        if self.epsilon == 0.0 {
            Strategy::SLoo
        } else {
            Strategy::TLoo
        }
    }
}

/// Indices whose leave-one-out total stays within epsilon (in count units)
/// of max(t_full, t_empty): the removal set of the default mode.
pub(crate) fn tolerated_indices(view: &LooView, epsilon: f64) -> Vec<u32> {
    let eps_units = epsilon * view.denom as f64;
    let threshold = view.t_full.max(view.t_empty) as f64 - eps_units;
    (0..view.n)
        .filter(|&i| view.t_loo[i as usize] as f64 >= threshold)
        .collect()
}

pub fn select_phi(table: &AccuracyTable, params: &PhiParams) -> SelectResult<SelectionOutcome> {
    if !(0.0..=1.0).contains(&params.epsilon) || params.epsilon.is_nan() {
        return Err(SelectError::InvalidEpsilon {
            value: params.epsilon,
        });
    }
    let strategy = params.strategy();
    let view = LooView::from_table(table)?;
    if view.n == 0 {
        let est = view.accuracy(view.t_empty);
        return Ok(crate::basic::outcome(
            table,
            strategy,
            Configuration::empty(),
            Some(est),
        ));
    }
    let eps_units = params.epsilon * view.denom as f64;
    let t_max = view.t_max().expect("n >= 1") as f64;
    let t_empty = view.t_empty as f64;
    let t_full = view.t_full as f64;

    if t_empty >= t_full.max(t_max - eps_units) {
        let est = view.accuracy(view.t_empty);
        return Ok(crate::basic::outcome(
            table,
            strategy,
            Configuration::empty(),
            Some(est),
        ));
    }
    if t_full > t_empty.max(t_max - eps_units) {
        let est = view.accuracy(view.t_full);
        return Ok(crate::basic::outcome(
            table,
            strategy,
            Configuration::full(view.n),
            Some(est),
        ));
    }
    let tolerated = tolerated_indices(&view, params.epsilon);
    let selected = match params.mode {
        PhiMode::PruneTolerated => Configuration::full(view.n).without(&tolerated),
        PhiMode::KeepTolerated => Configuration::canonicalize(&tolerated, view.n)?,
    };
    let est = table.pooled_accuracy(&selected).ok();
    Ok(crate::basic::outcome(table, strategy, selected, est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::table_with_totals;
    use kphint_core::Strategy;
    use proptest::prelude::*;

    #[test]
    fn branch_one_returns_empty_when_unhinted_dominates() {
        // A_empty 0.9, A_K 0.5, best LOO 0.8.
        let table = table_with_totals(
            2,
            4,
            25,
            &[(&[], 90), (&[0, 1], 50), (&[1], 80), (&[0], 70)],
        );
        let out = select_phi(&table, &PhiParams::strict()).unwrap();
        assert!(out.selected.is_empty());
        assert_eq!(out.est_accuracy, Some(0.9));
        assert_eq!(out.strategy, Strategy::SLoo);
    }

    #[test]
    fn branch_two_returns_full_when_all_kps_dominate() {
        // A_empty 0.2, A_K 0.8, LOO 0.7 / 0.75.
        let table = table_with_totals(
            2,
            4,
            25,
            &[(&[], 20), (&[0, 1], 80), (&[1], 70), (&[0], 75)],
        );
        let out = select_phi(&table, &PhiParams::strict()).unwrap();
        assert_eq!(out.selected.indices(), &[0, 1]);
        assert_eq!(out.est_accuracy, Some(0.8));
    }

    #[test]
    fn branch_three_prunes_non_degrading_removal() {
        // A_empty 0.4, A_K 0.6, A_wo_0 0.7, A_wo_1 0.55; strict epsilon
        // removes only index 0, keeping {1}.
        let table = table_with_totals(
            2,
            4,
            25,
            &[(&[], 40), (&[0, 1], 60), (&[1], 70), (&[0], 55)],
        );
        let out = select_phi(&table, &PhiParams::strict()).unwrap();
        assert_eq!(out.selected.indices(), &[1]);
        assert_eq!(out.est_accuracy, Some(0.7));
    }

    #[test]
    fn tolerant_epsilon_widens_the_removal_set() {
        // Same table but A_wo_1 = 0.58: within 1/32 of 0.6, so both KPs go
        // and the result collapses to the empty set.
        let table = table_with_totals(
            2,
            4,
            25,
            &[(&[], 40), (&[0, 1], 60), (&[1], 70), (&[0], 58)],
        );
        let out = select_phi(&table, &PhiParams::tolerant()).unwrap();
        assert!(out.selected.is_empty());
        assert_eq!(out.est_accuracy, Some(0.4));
        assert_eq!(out.strategy, Strategy::TLoo);

        let strict = select_phi(&table, &PhiParams::strict()).unwrap();
        assert_eq!(strict.selected.indices(), &[1]);
    }

    #[test]
    fn keep_tolerated_mode_inverts_branch_three() {
        let table = table_with_totals(
            2,
            4,
            25,
            &[(&[], 40), (&[0, 1], 60), (&[1], 70), (&[0], 55)],
        );
        let params = PhiParams::strict().with_mode(PhiMode::KeepTolerated);
        let out = select_phi(&table, &params).unwrap();
        assert_eq!(out.selected.indices(), &[0]);
    }

    #[test]
    fn zero_kps_degenerates_to_empty() {
        let table = table_with_totals(0, 4, 25, &[(&[], 40)]);
        let out = select_phi(&table, &PhiParams::tolerant()).unwrap();
        assert!(out.selected.is_empty());
        assert_eq!(out.est_accuracy, Some(0.4));
    }

    #[test]
    fn epsilon_outside_unit_interval_is_rejected() {
        assert!(PhiParams::new(-0.1).is_err());
        assert!(PhiParams::new(1.5).is_err());
        assert!(PhiParams::new(f64::NAN).is_err());
        assert!(PhiParams::new(1.0).is_ok());
    }

    proptest! {
        // Larger epsilon can only grow the removal set; when both epsilons
        // land in branch 3, the larger-epsilon result keeps no more KPs.
        #[test]
        fn removal_set_grows_with_epsilon(
            totals in proptest::collection::vec(0u64..=100, 2..=6),
            t_empty in 0u64..=100,
            t_full in 0u64..=100,
            eps1 in 0.0f64..=0.5,
            bump in 0.0f64..=0.5,
        ) {
            let n = totals.len() as u32;
            let mut cells: Vec<(Vec<u32>, u64)> = vec![(vec![], t_empty)];
            cells.push(((0..n).collect(), t_full));
            for i in 0..n {
                let loo: Vec<u32> = (0..n).filter(|&j| j != i).collect();
                cells.push((loo, totals[i as usize]));
            }
            let refs: Vec<(&[u32], u64)> =
                cells.iter().map(|(v, t)| (v.as_slice(), *t)).collect();
            let table = table_with_totals(n, 4, 25, &refs);
            let view = LooView::from_table(&table).unwrap();
            let eps2 = eps1 + bump;
            let r1 = tolerated_indices(&view, eps1);
            let r2 = tolerated_indices(&view, eps2);
            prop_assert!(r1.iter().all(|i| r2.contains(i)));

            let out1 = select_phi(&table, &PhiParams::new(eps1).unwrap()).unwrap();
            let out2 = select_phi(&table, &PhiParams::new(eps2).unwrap()).unwrap();
            let is_branch3 = |eps: f64| {
                let eps_units = eps * view.denom as f64;
                let t_max = view.t_max().unwrap() as f64;
                let b1 = (view.t_empty as f64) >= (view.t_full as f64).max(t_max - eps_units);
                let b2 = (view.t_full as f64) > (view.t_empty as f64).max(t_max - eps_units);
                !b1 && !b2
            };
            if is_branch3(eps1) && is_branch3(eps2) {
                prop_assert!(out2.selected.len() <= out1.selected.len());
            }
        }
    }
}
