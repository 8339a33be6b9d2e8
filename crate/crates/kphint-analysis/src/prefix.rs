//! Solution-prefix sweep: how much of the reference solution must leak
//! into the hint before accuracy jumps.

use crate::error::{AnalysisError, AnalysisResult};
use kphint_pipeline::emit_prompt;
use kphint_store::{PromptAccuracyProvider, Store};
use serde::{Deserialize, Serialize};

const HINT_HEADER: &str = "## Hint";

/// Accuracy measured with the first `ratio` percent of the reference
/// solution injected as the hint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixPoint {
    pub ratio: u32,
    pub tokens: usize,
    pub accuracy: f64,
}

/// First `ceil(ratio/100 * T)` whitespace tokens of `solution`, joined by
/// single spaces, where `T` is the total token count. `ratio` is clamped
/// so values above 100 return the whole solution.
pub fn prefix_hint(solution: &str, ratio: u32) -> String {
    let tokens: Vec<&str> = solution.split_whitespace().collect();
    let keep = (ratio as usize * tokens.len()).div_ceil(100).min(tokens.len());
    tokens[..keep].join(" ")
}

/// Evaluates the problem's prompt at each prefix ratio. A ratio of 0 uses
/// the plain unhinted prompt; non-empty prefixes go under the hint header.
pub fn prefix_sweep(
    store: &Store,
    problem_id: &str,
    ratios: &[u32],
    provider: &dyn PromptAccuracyProvider,
) -> AnalysisResult<Vec<PrefixPoint>> {
    let problem = store
        .problem(problem_id)
        .ok_or_else(|| AnalysisError::UnknownProblem { id: problem_id.to_string() })?;
    let solution = problem
        .reference_solution
        .as_deref()
        .ok_or_else(|| AnalysisError::MissingSolution { problem_id: problem_id.to_string() })?;
    let mut points = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let hint = prefix_hint(solution, ratio);
        let block = if hint.is_empty() {
            String::new()
        } else {
            format!("{HINT_HEADER}\n{hint}")
        };
        let prompt = emit_prompt(&problem, &block);
        let accuracy = provider.prompt_accuracy(problem_id, &prompt, &hint)?;
        points.push(PrefixPoint {
            ratio,
            tokens: hint.split_whitespace().count(),
            accuracy,
        });
    }
    Ok(points)
}
