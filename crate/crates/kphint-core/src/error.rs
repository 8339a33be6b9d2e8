use crate::Configuration;

/// Errors raised by the core domain types.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    /// A KP index lies outside the problem's index set `[0, n)`.
    #[error("kp index {index} out of range for problem with {n} kps")]
    IndexOutOfRange { index: u32, n: u32 },

    /// A configuration was queried that the accuracy table has no cell for.
    /// Callers holding a provider may react by requesting evaluation.
    #[error("configuration(s) not evaluated for problem {problem_id}: {}", format_configs(.configs))]
    NotEvaluated {
        problem_id: String,
        configs: Vec<Configuration>,
    },

    /// A cell's per-run count vector does not have exactly `runs` entries.
    #[error("cell for {config} has {got} run counts, expected {expected}")]
    RunCountLength {
        config: Configuration,
        expected: u32,
        got: usize,
    },

    /// A per-run correct count exceeds the number of samples in a run.
    #[error("run count {count} exceeds samples_per_run {samples_per_run}")]
    CountExceedsSamples { count: u32, samples_per_run: u32 },

    /// A table parameter (runs or samples_per_run) is zero.
    #[error("{field} must be at least 1")]
    ZeroParameter { field: &'static str },
}

fn format_configs(configs: &[Configuration]) -> String {
    let parts: Vec<String> = configs.iter().map(|c| c.to_string()).collect();
    parts.join(", ")
}

pub type CoreResult<T> = Result<T, CoreError>;
