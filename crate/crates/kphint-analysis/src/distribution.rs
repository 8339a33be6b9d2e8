//! Distribution of per-problem correct counts for a named configuration.

use crate::error::{AnalysisError, AnalysisResult};
use kphint_core::Configuration;
use kphint_store::Store;
use serde::{Deserialize, Serialize};

/// Which counts to histogram: one run's, or the pooled sum across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunMode {
    Single(u32),
    Pooled,
}

/// Histogram over correct-count values {0..max_count}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    /// "run3" or "pooled": which counts were histogrammed.
    pub mode: String,
    pub max_count: u32,
    pub problems: usize,
    /// fractions[c] = share of problems with exactly c correct; sums to 1.
    pub fractions: Vec<f64>,
}

/// Histograms the correct count of each problem's named configuration.
/// `Single(r)` uses run r's count out of samples_per_run (the default run
/// is 0); `Pooled` sums across runs, widening the domain accordingly.
pub fn correct_count_distribution(
    store: &Store,
    configs: &[(String, Configuration)],
    mode: RunMode,
) -> AnalysisResult<CountDistribution> {
    if configs.is_empty() {
        return Err(AnalysisError::EmptyInput { what: "configs" });
    }
    let max_count = match mode {
        RunMode::Single(run) => {
            if run >= store.runs() {
                return Err(AnalysisError::RunOutOfRange {
                    run,
                    runs: store.runs(),
                });
            }
            store.samples_per_run()
        }
        RunMode::Pooled => store.runs() * store.samples_per_run(),
    };
    let mut tallies = vec![0u64; max_count as usize + 1];
    for (id, config) in configs {
        let table = store.table(id).ok_or_else(|| AnalysisError::NoKps {
            problem_id: id.clone(),
        })?;
        let counts = table.counts(config).ok_or_else(|| {
            kphint_core::CoreError::NotEvaluated {
                problem_id: id.clone(),
                configs: vec![config.clone()],
            }
        })?;
        let value = match mode {
            RunMode::Single(run) => counts[run as usize],
            RunMode::Pooled => counts.iter().sum(),
        };
        tallies[value as usize] += 1;
    }
    let n = configs.len();
    Ok(CountDistribution {
        mode: match mode {
            RunMode::Single(run) => format!("run{run}"),
            RunMode::Pooled => "pooled".to_string(),
        },
        max_count,
        problems: n,
        fractions: tallies.iter().map(|&t| t as f64 / n as f64).collect(),
    })
}
