use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};
use crate::Configuration;

/// Per-problem record of per-configuration, per-run correct counts.
///
/// Every accuracy the selection strategies consume is derived from this
/// table: pooled accuracy A(c), per-run accuracy A^(j)(c), and the per-run
/// variance Var(c). Counts are stored as exact integers; comparisons that
/// drive selection decisions are done on count totals over the shared
/// denominator `runs * samples_per_run`, so equal accuracies compare equal
/// with no rounding involved.
///
/// Tables are sparse: `n_kps` bounds the index set, but cells exist only
/// for configurations that have actually been evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub problem_id: String,
    pub n_kps: u32,
    pub runs: u32,
    pub samples_per_run: u32,
    cells: BTreeMap<Configuration, Vec<u32>>,
}

impl AccuracyTable {
    /// Creates an empty table. The paper-default shape is 8 runs of 32
    /// samples; both are configurable but must be at least 1.
    pub fn new(
        problem_id: impl Into<String>,
        n_kps: u32,
        runs: u32,
        samples_per_run: u32,
    ) -> CoreResult<Self> {
        if runs == 0 {
            return Err(CoreError::ZeroParameter { field: "runs" });
        }
        if samples_per_run == 0 {
            return Err(CoreError::ZeroParameter {
                field: "samples_per_run",
            });
        }
        Ok(AccuracyTable {
            problem_id: problem_id.into(),
            n_kps,
            runs,
            samples_per_run,
            cells: BTreeMap::new(),
        })
    }

    /// Total samples behind every pooled accuracy in this table.
    pub fn denominator(&self) -> u64 {
        self.runs as u64 * self.samples_per_run as u64
    }

    /// Stores per-run correct counts for a configuration. Validates the
    /// run-count shape; re-inserting the same cell is allowed (the canonical
    /// key prevents duplicate cells for set-equal subsets).
    pub fn insert_cell(&mut self, config: Configuration, counts: Vec<u32>) -> CoreResult<()> {
        for &index in config.indices() {
            if index >= self.n_kps {
                return Err(CoreError::IndexOutOfRange {
                    index,
                    n: self.n_kps,
                });
            }
        }
        if counts.len() != self.runs as usize {
            return Err(CoreError::RunCountLength {
                config,
                expected: self.runs,
                got: counts.len(),
            });
        }
        if let Some(&count) = counts.iter().find(|&&c| c > self.samples_per_run) {
            return Err(CoreError::CountExceedsSamples {
                count,
                samples_per_run: self.samples_per_run,
            });
        }
        self.cells.insert(config, counts);
        Ok(())
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        self.cells.contains_key(config)
    }

    pub fn counts(&self, config: &Configuration) -> Option<&[u32]> {
        self.cells.get(config).map(|c| c.as_slice())
    }

    /// Iterates cells in canonical configuration order.
    pub fn cells(&self) -> impl Iterator<Item = (&Configuration, &[u32])> {
        self.cells.iter().map(|(c, v)| (c, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn require(&self, config: &Configuration) -> CoreResult<&[u32]> {
        self.counts(config).ok_or_else(|| CoreError::NotEvaluated {
            problem_id: self.problem_id.clone(),
            configs: vec![config.clone()],
        })
    }

    /// Total correct count pooled over runs. Exact; this is the value the
    /// selectors compare when ranking configurations.
    pub fn total_correct(&self, config: &Configuration) -> CoreResult<u64> {
        Ok(self.require(config)?.iter().map(|&c| c as u64).sum())
    }

    /// Pooled accuracy A(c) = sum of run counts / (runs * samples_per_run).
    pub fn pooled_accuracy(&self, config: &Configuration) -> CoreResult<f64> {
        Ok(self.total_correct(config)? as f64 / self.denominator() as f64)
    }

    /// Per-run accuracies A^(j)(c) = count_j / samples_per_run.
    pub fn per_run_accuracies(&self, config: &Configuration) -> CoreResult<Vec<f64>> {
        let s = self.samples_per_run as f64;
        Ok(self.require(config)?.iter().map(|&c| c as f64 / s).collect())
    }

    /// Population variance of the per-run accuracies, normalized by the run
    /// count (1/8 at the default shape), not runs − 1.
    pub fn run_variance(&self, config: &Configuration) -> CoreResult<f64> {
        let accs = self.per_run_accuracies(config)?;
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        Ok(accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64)
    }

    /// The empty, full, and all leave-one-out configurations: the cells the
    /// LOO-family strategies require.
    pub fn loo_family(&self) -> Vec<Configuration> {
        let mut configs = vec![Configuration::empty(), Configuration::full(self.n_kps)];
        for i in 0..self.n_kps {
            configs.push(Configuration::leave_one_out(self.n_kps, i).expect("i < n_kps"));
        }
        configs
    }

    /// Which of the given configurations have no cell yet.
    pub fn missing<'a>(
        &self,
        configs: impl IntoIterator<Item = &'a Configuration>,
    ) -> Vec<Configuration> {
        configs
            .into_iter()
            .filter(|c| !self.contains(c))
            .cloned()
            .collect()
    }

    /// Error carrying every missing configuration from `configs`, or Ok
    /// when all are present.
    pub fn require_all<'a>(
        &self,
        configs: impl IntoIterator<Item = &'a Configuration>,
    ) -> CoreResult<()> {
        let missing = self.missing(configs);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CoreError::NotEvaluated {
                problem_id: self.problem_id.clone(),
                configs: missing,
            })
        }
    }
}
