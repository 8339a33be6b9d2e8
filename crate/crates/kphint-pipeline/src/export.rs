//! Training-data export: one augmented prompt per problem, hint injected
//! only for hard problems with a non-empty selected KP subset.

use crate::error::PipelineResult;
use crate::evaluate::hinted_prompt;
use crate::template::emit_prompt;
use kphint_core::Configuration;
use kphint_store::{SelectionRecord, Store};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// One exported training example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub problem_id: String,
    pub prompt: String,
    pub answer: String,
    pub selected: Configuration,
    /// Whether the prompt carries a hint block. False when the selection is
    /// empty or the problem was already easy enough unhinted.
    pub hinted: bool,
}

/// A problem left out of the export, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedProblem {
    pub problem_id: String,
    pub reason: String,
}

/// Aggregate statistics over the exported records. Means are `None` when
/// nothing was exported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportSummary {
    pub exported: usize,
    pub skipped: usize,
    /// Arithmetic mean of exported selected-set sizes.
    pub mean_selected_kps: Option<f64>,
    /// Arithmetic mean of exported problems' total KP counts.
    pub mean_total_kps: Option<f64>,
    /// Percent reduction of selected vs total, (1 - sel/total) * 100.
    pub reduction_percent: Option<f64>,
}

impl ExportSummary {
    /// One-line human rendering with the reduction at one decimal.
    pub fn display_line(&self) -> String {
        match (self.mean_selected_kps, self.mean_total_kps, self.reduction_percent) {
            (Some(sel), Some(total), Some(red)) => format!(
                "exported {} (skipped {}): mean KPs {:.2} of {:.2} (-{:.1}%)",
                self.exported, self.skipped, sel, total, red
            ),
            _ => format!("exported {} (skipped {})", self.exported, self.skipped),
        }
    }
}

/// Full result of an export pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportOutcome {
    pub records: Vec<TrainingRecord>,
    pub skipped: Vec<SkippedProblem>,
    pub summary: ExportSummary,
}

/// Builds one training record per stored problem, ordered by problem id.
///
/// A hint block is injected only when the problem's selection is non-empty
/// and its unhinted accuracy is below `injection_threshold`. Problems
/// without a usable selection (or whose gate cannot be decided) land in the
/// skipped report instead of failing the export. When `selections` holds
/// several records for one problem the last wins.
pub fn export_training_data(
    store: &Store,
    selections: &[SelectionRecord],
    injection_threshold: f64,
) -> PipelineResult<ExportOutcome> {
    let by_problem: HashMap<&str, &SelectionRecord> = selections
        .iter()
        .map(|s| (s.problem_id.as_str(), s))
        .collect();

    let mut ids = store.problem_ids();
    ids.sort();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut selected_total = 0usize;
    let mut kp_total = 0usize;
    for id in &ids {
        let problem = store.problem(id).expect("listed id is present");
        let Some(selection) = by_problem.get(id.as_str()) else {
            skipped.push(SkippedProblem {
                problem_id: id.clone(),
                reason: "no selection available".into(),
            });
            continue;
        };
        let kps = store.kps(id);
        let selected = &selection.selected;

        let inject = if selected.is_empty() {
            false
        } else {
            match unhinted_accuracy(store, id) {
                Some(a_empty) => a_empty < injection_threshold,
                None => {
                    skipped.push(SkippedProblem {
                        problem_id: id.clone(),
                        reason: "unhinted accuracy not evaluated; injection gate undecidable"
                            .into(),
                    });
                    continue;
                }
            }
        };
        let prompt = if inject {
            match hinted_prompt(&problem, &kps, selected) {
                Ok(prompt) => prompt,
                Err(err) => {
                    skipped.push(SkippedProblem {
                        problem_id: id.clone(),
                        reason: err.to_string(),
                    });
                    continue;
                }
            }
        } else {
            emit_prompt(&problem, "")
        };

        selected_total += selected.indices().len();
        kp_total += kps.len();
        records.push(TrainingRecord {
            problem_id: id.clone(),
            prompt,
            answer: problem.gold_answer,
            selected: selected.clone(),
            hinted: inject,
        });
    }

    let exported = records.len();
    let (mean_selected_kps, mean_total_kps, reduction_percent) = if exported > 0 {
        let sel = selected_total as f64 / exported as f64;
        let total = kp_total as f64 / exported as f64;
        let reduction = if total > 0.0 {
            Some((1.0 - sel / total) * 100.0)
        } else {
            None
        };
        (Some(sel), Some(total), reduction)
    } else {
        (None, None, None)
    };
    Ok(ExportOutcome {
        summary: ExportSummary {
            exported,
            skipped: skipped.len(),
            mean_selected_kps,
            mean_total_kps,
            reduction_percent,
        },
        records,
        skipped,
    })
}

/// Pooled accuracy of the empty configuration, if evaluated.
fn unhinted_accuracy(store: &Store, problem_id: &str) -> Option<f64> {
    let counts = store.counts(problem_id, &Configuration::empty())?;
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    let denom = counts.len() as u64 * store.samples_per_run() as u64;
    Some(total as f64 / denom as f64)
}
