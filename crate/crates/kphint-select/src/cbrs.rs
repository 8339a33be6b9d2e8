//! Consensus-based robust selection.
//!
//! Each run votes independently: a candidate is near-optimal in run j when
//! its run accuracy is within delta of that run's best candidate. The
//! consensus pool is the intersection of the per-run sets (or the
//! argmax-vote set when the intersection is empty); remaining ties fall to
//! minimum per-run variance, then fewest KPs, then lexicographic order.

use crate::error::{SelectError, SelectResult};
use kphint_core::{AccuracyTable, Configuration, SelectionOutcome, Strategy};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const DEFAULT_DELTA: f64 = 1.0 / 32.0;

/// How the final winner was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakPath {
    Intersection,
    Vote,
    Variance,
    Cardinality,
}

/// Full audit trail of one consensus decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusReport {
    /// O^(j): near-optimal candidates per run, in run order.
    pub per_run_near_optimal: Vec<Vec<Configuration>>,
    /// The pool the winner was drawn from: the non-empty intersection, or
    /// the argmax-vote set.
    pub consensus: Vec<Configuration>,
    pub delta: f64,
    pub winner: Configuration,
    pub tie_break_path: TieBreakPath,
}

/// Per-run integer squared-deviation score: proportional to the population
/// variance of the run accuracies, compared exactly.
fn variance_score(counts: &[u32]) -> u128 {
    let runs = counts.len() as i128;
    let total: i128 = counts.iter().map(|&c| i128::from(c)).sum();
    counts
        .iter()
        .map(|&c| {
            let dev = runs * i128::from(c) - total;
            (dev * dev) as u128
        })
        .sum()
}

pub fn select_cbrs(table: &AccuracyTable, delta: f64) -> SelectResult<SelectionOutcome> {
    if !(0.0..=1.0).contains(&delta) || delta.is_nan() {
        return Err(SelectError::InvalidDelta { value: delta });
    }
    let n = table.n_kps;
    let mut candidates: BTreeSet<Configuration> = BTreeSet::new();
    candidates.insert(Configuration::empty());
    candidates.insert(Configuration::full(n));
    for i in 0..n {
        candidates.insert(Configuration::leave_one_out(n, i)?);
    }
    let candidates: Vec<Configuration> = candidates.into_iter().collect();
    table.require_all(&candidates)?;
    if n == 0 {
        let empty = Configuration::empty();
        let est = table.pooled_accuracy(&empty)?;
        return Ok(crate::basic::outcome(table, Strategy::Cbrs, empty, Some(est)));
    }

    let delta_units = delta * f64::from(table.samples_per_run);
    let runs = table.runs as usize;
    let mut per_run: Vec<Vec<Configuration>> = Vec::with_capacity(runs);
    for run in 0..runs {
        let run_count = |c: &Configuration| table.counts(c).expect("required above")[run];
        let max = candidates.iter().map(&run_count).max().expect("non-empty");
        let near: Vec<Configuration> = candidates
            .iter()
            .filter(|c| f64::from(run_count(c)) >= f64::from(max) - delta_units)
            .cloned()
            .collect();
        per_run.push(near);
    }

    let mut intersection: Vec<Configuration> = candidates
        .iter()
        .filter(|c| per_run.iter().all(|o| o.contains(c)))
        .cloned()
        .collect();
    let (pool, base_path) = if intersection.is_empty() {
        let votes: Vec<usize> = candidates
            .iter()
            .map(|c| per_run.iter().filter(|o| o.contains(c)).count())
            .collect();
        let best = *votes.iter().max().expect("non-empty");
        let vote_set: Vec<Configuration> = candidates
            .iter()
            .zip(&votes)
            .filter(|(_, &v)| v == best)
            .map(|(c, _)| c.clone())
            .collect();
        (vote_set, TieBreakPath::Vote)
    } else {
        (std::mem::take(&mut intersection), TieBreakPath::Intersection)
    };

    let (winner, path) = if pool.len() == 1 {
        (pool[0].clone(), base_path)
    } else {
        let scores: Vec<u128> = pool
            .iter()
            .map(|c| variance_score(table.counts(c).expect("required above")))
            .collect();
        let min = *scores.iter().min().expect("non-empty pool");
        let low_variance: Vec<&Configuration> = pool
            .iter()
            .zip(&scores)
            .filter(|(_, &s)| s == min)
            .map(|(c, _)| c)
            .collect();
        if low_variance.len() == 1 {
            (low_variance[0].clone(), TieBreakPath::Variance)
        } else {
            let winner = low_variance
                .iter()
                .min_by(|a, b| a.selection_order(b))
                .expect("non-empty")
                .to_owned()
                .clone();
            (winner, TieBreakPath::Cardinality)
        }
    };

    let est = table.pooled_accuracy(&winner)?;
    let report = ConsensusReport {
        per_run_near_optimal: per_run,
        consensus: pool,
        delta,
        winner: winner.clone(),
        tie_break_path: path,
    };
    Ok(SelectionOutcome {
        problem_id: table.problem_id.clone(),
        strategy: Strategy::Cbrs,
        selected: winner,
        est_accuracy: Some(est),
        evaluations_requested: 0,
        notes: serde_json::to_string(&report).expect("report serializes"),
    })
}
