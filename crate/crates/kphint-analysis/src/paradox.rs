//! Cross-hint interaction analysis: the positive-contribution set and the
//! rate at which removing several helpful KPs together underperforms the
//! average of removing them one at a time.

use crate::error::{AnalysisError, AnalysisResult};
use kphint_core::{AccuracyTable, Configuration};
use kphint_store::{RolloutProvider, Store};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;

/// KPs whose removal does not drop accuracy below both baselines:
/// K+ = {i : A(K minus i) >= max(A_K, A_empty)}. Compared in exact count
/// space at the table's shared denominator.
pub fn positive_contribution_set(table: &AccuracyTable) -> AnalysisResult<Configuration> {
    let family = table.loo_family();
    table.require_all(&family)?;
    let t_empty = table.total_correct(&Configuration::empty())?;
    let t_full = table.total_correct(&Configuration::full(table.n_kps))?;
    let threshold = t_full.max(t_empty);
    let mut members = Vec::new();
    for i in 0..table.n_kps {
        let loo = Configuration::leave_one_out(table.n_kps, i)?;
        if table.total_correct(&loo)? >= threshold {
            members.push(i);
        }
    }
    Ok(Configuration::from_sorted(members))
}

/// One examined subset S of a problem's positive-contribution set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxPair {
    pub problem_id: String,
    pub subset: Configuration,
    /// A(K minus S): accuracy after removing the whole subset at once.
    pub a_joint: f64,
    /// Mean of A(K minus i) over i in S.
    pub a_single_mean: f64,
    /// Whether the joint accuracy falls strictly below the single mean,
    /// decided in exact count space.
    pub strict: bool,
}

/// Per-problem tally of examined subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemParadoxSummary {
    pub problem_id: String,
    pub kplus_size: u32,
    pub pairs_examined: u64,
    pub strict_pairs: u64,
    /// True when the subset space exceeded the cap and was sampled.
    pub sampled: bool,
}

/// Pooled interaction statistics across a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub m: u32,
    pub subset_cap: u32,
    pub pairs_examined: u64,
    pub strict_pairs: u64,
    /// Fraction of examined subsets with a strict joint shortfall, pooled
    /// over all (problem, subset) pairs. Zero when nothing was examined.
    pub p_m: f64,
    /// Mean shortfall over exactly the strict pairs; `None` when there are
    /// none.
    pub delta_m: Option<f64>,
    /// Mean of per-problem strict rates over problems with at least one
    /// examined subset, reported alongside the pooled rate.
    pub per_problem_rate: Option<f64>,
    pub per_problem: Vec<ProblemParadoxSummary>,
    pub details: Vec<ParadoxPair>,
}

/// Examines size-m subsets of every problem's positive-contribution set,
/// evaluating joint-removal configurations through the store (and its
/// provider) as needed. Problems are processed in id order; when a problem
/// has more than `subset_cap` candidate subsets, a deterministic seeded
/// sample of `subset_cap` of them is examined instead.
pub fn paradox_stats(
    store: &Store,
    m: u32,
    provider: &dyn RolloutProvider,
    subset_cap: u32,
) -> AnalysisResult<ParadoxReport> {
    if m < 2 {
        return Err(AnalysisError::InvalidM { m });
    }
    let mut ids = store.problem_ids();
    ids.sort();

    let denominator = store.runs() as u64 * store.samples_per_run() as u64;
    let mut per_problem = Vec::new();
    let mut details = Vec::new();
    let mut pairs_examined = 0u64;
    let mut strict_pairs = 0u64;
    let mut gap_sum = 0.0f64;
    let mut problem_rates = Vec::new();

    for id in &ids {
        let n_kps = store
            .table(id)
            .ok_or_else(|| AnalysisError::NoKps {
                problem_id: id.clone(),
            })?
            .n_kps;

        let t_empty = total(store, id, &Configuration::empty(), provider)?;
        let t_full = total(store, id, &Configuration::full(n_kps), provider)?;
        let mut t_loo = Vec::with_capacity(n_kps as usize);
        for i in 0..n_kps {
            let loo = Configuration::leave_one_out(n_kps, i)?;
            t_loo.push(total(store, id, &loo, provider)?);
        }
        let threshold = t_full.max(t_empty);
        let kplus: Vec<u32> = (0..n_kps).filter(|&i| t_loo[i as usize] >= threshold).collect();

        if (kplus.len() as u64) < m as u64 {
            per_problem.push(ProblemParadoxSummary {
                problem_id: id.clone(),
                kplus_size: kplus.len() as u32,
                pairs_examined: 0,
                strict_pairs: 0,
                sampled: false,
            });
            continue;
        }

        let space = binom_capped(kplus.len() as u64, m as u64, subset_cap as u64);
        let sampled = space > subset_cap as u64;
        let subsets = if sampled {
            sample_subsets(id, &kplus, m as usize, subset_cap as usize)
        } else {
            enumerate_subsets(&kplus, m as usize)
        };

        let mut problem_pairs = 0u64;
        let mut problem_strict = 0u64;
        for subset in subsets {
            let joint = Configuration::full(n_kps).without(subset.indices());
            let t_joint = total(store, id, &joint, provider)?;
            let single_sum: u64 = subset
                .indices()
                .iter()
                .map(|&i| t_loo[i as usize])
                .sum();
            let strict = m as u64 * t_joint < single_sum;
            let a_joint = t_joint as f64 / denominator as f64;
            let a_single_mean = single_sum as f64 / (m as u64 * denominator) as f64;
            problem_pairs += 1;
            if strict {
                problem_strict += 1;
                gap_sum += (single_sum - m as u64 * t_joint) as f64
                    / (m as u64 * denominator) as f64;
            }
            details.push(ParadoxPair {
                problem_id: id.clone(),
                subset,
                a_joint,
                a_single_mean,
                strict,
            });
        }
        pairs_examined += problem_pairs;
        strict_pairs += problem_strict;
        problem_rates.push(problem_strict as f64 / problem_pairs as f64);
        per_problem.push(ProblemParadoxSummary {
            problem_id: id.clone(),
            kplus_size: kplus.len() as u32,
            pairs_examined: problem_pairs,
            strict_pairs: problem_strict,
            sampled,
        });
    }

    let p_m = if pairs_examined == 0 {
        0.0
    } else {
        strict_pairs as f64 / pairs_examined as f64
    };
    let delta_m = (strict_pairs > 0).then(|| gap_sum / strict_pairs as f64);
    let per_problem_rate = (!problem_rates.is_empty())
        .then(|| problem_rates.iter().sum::<f64>() / problem_rates.len() as f64);
    Ok(ParadoxReport {
        m,
        subset_cap,
        pairs_examined,
        strict_pairs,
        p_m,
        delta_m,
        per_problem_rate,
        per_problem,
        details,
    })
}

fn total(
    store: &Store,
    problem_id: &str,
    config: &Configuration,
    provider: &dyn RolloutProvider,
) -> AnalysisResult<u64> {
    let counts = store.fetch_or_request(problem_id, config, provider)?;
    Ok(counts.iter().map(|&c| c as u64).sum())
}

/// min(C(k, m), cap + 1): exact while at most cap, saturates just above.
fn binom_capped(k: u64, m: u64, cap: u64) -> u64 {
    if m > k {
        return 0;
    }
    let m = m.min(k - m);
    let mut c: u128 = 1;
    for i in 0..m {
        c = c * (k - i) as u128 / (i + 1) as u128;
        if c > cap as u128 {
            return cap + 1;
        }
    }
    c as u64
}

/// All size-m subsets of `members`, in lexicographic index order.
fn enumerate_subsets(members: &[u32], m: usize) -> Vec<Configuration> {
    let mut positions: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    loop {
        out.push(Configuration::from_sorted(
            positions.iter().map(|&p| members[p]).collect(),
        ));
        // Advance the rightmost position that can still move.
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if positions[i] != members.len() - m + i {
                break;
            }
        }
        positions[i] += 1;
        for j in i + 1..m {
            positions[j] = positions[j - 1] + 1;
        }
    }
}

/// A deterministic uniform sample of `cap` distinct size-m subsets, seeded
/// from the problem id and m so results do not depend on traversal order.
fn sample_subsets(problem_id: &str, members: &[u32], m: usize, cap: usize) -> Vec<Configuration> {
    let digest = Sha256::digest(format!("{problem_id}|{m}").as_bytes());
    let seed = u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut pool: Vec<u32> = members.to_vec();
    while chosen.len() < cap {
        let (head, _) = pool.partial_shuffle(&mut rng, m);
        let mut subset = head.to_vec();
        subset.sort_unstable();
        chosen.insert(subset);
    }
    chosen
        .into_iter()
        .map(Configuration::from_sorted)
        .collect()
}
