//! Difficulty buckets: problems grouped by unhinted accuracy, with hinted
//! accuracy statistics per bucket.

use crate::error::{AnalysisError, AnalysisResult};
use kphint_core::Configuration;
use kphint_store::{SelectionRecord, Store};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Percentile points reported per bucket.
pub const QUANTILE_POINTS: [f64; 5] = [5.0, 25.0, 50.0, 75.0, 95.0];

/// Statistics for one difficulty bucket. All stats are `None` when the
/// bucket is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub n: usize,
    /// Mean unhinted accuracy of the bucket's problems.
    pub mu_wo: Option<f64>,
    /// Mean hinted accuracy.
    pub mu_with: Option<f64>,
    /// Hinted-accuracy percentiles at `QUANTILE_POINTS`.
    pub quantiles: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketReport {
    pub bucket_edges: Vec<f64>,
    pub per_bucket: Vec<BucketStats>,
}

/// Ten equal-width bins over [0, 1].
pub fn default_edges() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Groups each selected problem by its unhinted accuracy and summarizes the
/// selected configuration's accuracy inside every bucket.
///
/// Buckets are right-open except the last, which also contains 1.0. When
/// `selections` holds several records for one problem the last wins.
pub fn difficulty_buckets(
    store: &Store,
    selections: &[SelectionRecord],
    edges: &[f64],
) -> AnalysisResult<BucketReport> {
    validate_edges(edges)?;
    if selections.is_empty() {
        return Err(AnalysisError::EmptyInput { what: "selections" });
    }
    let by_problem: BTreeMap<&str, &Configuration> = selections
        .iter()
        .map(|s| (s.problem_id.as_str(), &s.selected))
        .collect();

    let buckets = edges.len() - 1;
    let mut wo: Vec<Vec<f64>> = vec![Vec::new(); buckets];
    let mut with: Vec<Vec<f64>> = vec![Vec::new(); buckets];
    for (&id, config) in &by_problem {
        if store.problem(id).is_none() {
            return Err(AnalysisError::UnknownProblem { id: id.to_string() });
        }
        let table = store.table(id).ok_or_else(|| AnalysisError::NoKps {
            problem_id: id.to_string(),
        })?;
        let a_wo = table.pooled_accuracy(&Configuration::empty())?;
        let a_with = table.pooled_accuracy(config)?;
        let k = bucket_index(a_wo, edges);
        wo[k].push(a_wo);
        with[k].push(a_with);
    }

    let per_bucket = (0..buckets)
        .map(|k| {
            let n = wo[k].len();
            if n == 0 {
                return BucketStats {
                    n: 0,
                    mu_wo: None,
                    mu_with: None,
                    quantiles: None,
                };
            }
            let mut hinted = with[k].clone();
            hinted.sort_by(|a, b| a.total_cmp(b));
            BucketStats {
                n,
                mu_wo: Some(wo[k].iter().sum::<f64>() / n as f64),
                mu_with: Some(with[k].iter().sum::<f64>() / n as f64),
                quantiles: Some(
                    QUANTILE_POINTS
                        .iter()
                        .map(|&p| percentile(&hinted, p))
                        .collect(),
                ),
            }
        })
        .collect();
    Ok(BucketReport {
        bucket_edges: edges.to_vec(),
        per_bucket,
    })
}

fn validate_edges(edges: &[f64]) -> AnalysisResult<()> {
    if edges.len() < 2 {
        return Err(AnalysisError::InvalidEdges {
            message: "need at least two edges".into(),
        });
    }
    if edges[0] != 0.0 || *edges.last().unwrap() != 1.0 {
        return Err(AnalysisError::InvalidEdges {
            message: "edges must start at 0 and end at 1".into(),
        });
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InvalidEdges {
            message: "edges must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// Index of the bucket containing `a`: right-open intervals, with the last
/// bucket also owning its right endpoint.
fn bucket_index(a: f64, edges: &[f64]) -> usize {
    let buckets = edges.len() - 1;
    (0..buckets)
        .find(|&k| a < edges[k + 1])
        .unwrap_or(buckets - 1)
}

/// Linear-interpolation percentile of an ascending-sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (rank - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use kphint_core::{Problem, Strategy};

    fn selection(id: &str, indices: &[u32]) -> SelectionRecord {
        SelectionRecord {
            problem_id: id.into(),
            strategy: Strategy::Css,
            selected: Configuration::canonicalize(indices, 1).unwrap(),
            est_accuracy: None,
            evaluations_requested: 0,
            notes: String::new(),
        }
    }

    /// Problem with unhinted count `wo` and count `with_kp` for {0}, out
    /// of 10 samples in one run.
    fn seed(store: &Store, id: &str, wo: u32, with_kp: u32) {
        store.put_problem(Problem::new(id, "q", "a"));
        store
            .insert_counts(id, &Configuration::empty(), vec![wo])
            .unwrap();
        store
            .insert_counts(id, &Configuration::from_sorted(vec![0]), vec![with_kp])
            .unwrap();
    }

    #[test]
    fn hand_fixture_statistics_check_out() {
        let store = Store::new(1, 10).unwrap();
        // Easy half: unhinted 5..=8 and 10 of 10; hard half: 0..=4.
        let data: &[(&str, u32, u32)] = &[
            ("p0", 0, 2),
            ("p1", 1, 4),
            ("p2", 2, 6),
            ("p3", 3, 8),
            ("p4", 4, 10),
            ("p5", 5, 6),
            ("p6", 6, 7),
            ("p7", 7, 8),
            ("p8", 8, 9),
            ("p9", 10, 10),
        ];
        let mut selections = Vec::new();
        for &(id, wo, with_kp) in data {
            seed(&store, id, wo, with_kp);
            selections.push(selection(id, &[0]));
        }
        let report =
            difficulty_buckets(&store, &selections, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(report.per_bucket.len(), 2);
        let hard = &report.per_bucket[0];
        assert_eq!(hard.n, 5);
        assert!((hard.mu_wo.unwrap() - 0.2).abs() < 1e-12);
        assert!((hard.mu_with.unwrap() - 0.6).abs() < 1e-12);
        // Hinted values 0.2 0.4 0.6 0.8 1.0: interpolated percentiles.
        let q = hard.quantiles.as_ref().unwrap();
        assert!((q[0] - 0.24).abs() < 1e-12);
        assert!((q[1] - 0.4).abs() < 1e-12);
        assert!((q[2] - 0.6).abs() < 1e-12);
        assert!((q[3] - 0.8).abs() < 1e-12);
        assert!((q[4] - 0.96).abs() < 1e-12);
        let easy = &report.per_bucket[1];
        assert_eq!(easy.n, 5);
        assert!((easy.mu_wo.unwrap() - 0.72).abs() < 1e-12);
        let total: usize = report.per_bucket.iter().map(|b| b.n).sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn all_zero_accuracy_lands_in_the_first_bucket() {
        let store = Store::new(1, 10).unwrap();
        for id in ["a", "b", "c"] {
            seed(&store, id, 0, 5);
        }
        let selections: Vec<_> = ["a", "b", "c"].iter().map(|id| selection(id, &[0])).collect();
        let report = difficulty_buckets(&store, &selections, &default_edges()).unwrap();
        assert_eq!(report.per_bucket[0].n, 3);
        assert_eq!(report.per_bucket[0].mu_wo, Some(0.0));
        assert!(report.per_bucket[1..].iter().all(|b| b.n == 0));
    }

    #[test]
    fn boundary_values_resolve_right_open_with_closed_top() {
        let store = Store::new(1, 10).unwrap();
        seed(&store, "mid", 5, 5);
        seed(&store, "top", 10, 10);
        let selections = vec![selection("mid", &[0]), selection("top", &[0])];
        let report =
            difficulty_buckets(&store, &selections, &[0.0, 0.5, 1.0]).unwrap();
        // 0.5 opens the second bucket; 1.0 closes it.
        assert_eq!(report.per_bucket[0].n, 0);
        assert_eq!(report.per_bucket[1].n, 2);
        assert_eq!(report.per_bucket[0].mu_wo, None);
        assert_eq!(report.per_bucket[0].quantiles, None);
    }

    #[test]
    fn one_problem_per_interval_example() {
        let store = Store::new(1, 100).unwrap();
        store.put_problem(Problem::new("lo", "q", "a"));
        store.insert_counts("lo", &Configuration::empty(), vec![25]).unwrap();
        store
            .insert_counts("lo", &Configuration::from_sorted(vec![0]), vec![50])
            .unwrap();
        store.put_problem(Problem::new("hi", "q", "a"));
        store.insert_counts("hi", &Configuration::empty(), vec![75]).unwrap();
        store
            .insert_counts("hi", &Configuration::from_sorted(vec![0]), vec![80])
            .unwrap();
        let selections = vec![selection("lo", &[0]), selection("hi", &[0])];
        let report =
            difficulty_buckets(&store, &selections, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(report.per_bucket[0].n, 1);
        assert_eq!(report.per_bucket[1].n, 1);
        assert_eq!(report.per_bucket[0].mu_wo, Some(0.25));
        assert_eq!(report.per_bucket[1].mu_wo, Some(0.75));
    }

    #[test]
    fn bad_edges_are_rejected() {
        let store = Store::new(1, 10).unwrap();
        let sels = vec![selection("x", &[0])];
        for edges in [
            vec![0.0],
            vec![0.1, 1.0],
            vec![0.0, 0.9],
            vec![0.0, 0.5, 0.5, 1.0],
            vec![0.0, 0.7, 0.3, 1.0],
        ] {
            assert!(matches!(
                difficulty_buckets(&store, &sels, &edges),
                Err(AnalysisError::InvalidEdges { .. })
            ));
        }
    }

    #[test]
    fn missing_hinted_cell_is_not_evaluated() {
        let store = Store::new(1, 10).unwrap();
        store.put_problem(Problem::new("p", "q", "a"));
        store.insert_counts("p", &Configuration::empty(), vec![3]).unwrap();
        let err = difficulty_buckets(&store, &[selection("p", &[0])], &default_edges())
            .unwrap_err();
        assert!(matches!(err, AnalysisError::Core(_)));
    }

    #[test]
    fn default_edges_are_ten_equal_bins() {
        let edges = default_edges();
        assert_eq!(edges.len(), 11);
        assert_eq!(edges[0], 0.0);
        assert_eq!(edges[10], 1.0);
        assert!((edges[3] - 0.3).abs() < 1e-12);
    }
}
