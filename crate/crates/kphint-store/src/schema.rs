//! On-disk record shapes for the line-delimited files.
//!
//! Files are UTF-8, one JSON record per line. Index arrays are always
//! canonical-sorted. A file may start with header records of the form
//! `{"kind":"header",...}`; readers skip them.

use kphint_core::{Configuration, KnowledgePoint, KpStatus, Problem, Strategy};
use serde::{Deserialize, Serialize};

/// Provenance header emitted at the top of output files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderRecord {
    pub kind: String,
    pub config_hash: String,
}

impl HeaderRecord {
    pub fn new(config_hash: impl Into<String>) -> Self {
        HeaderRecord {
            kind: "header".to_string(),
            config_hash: config_hash.into(),
        }
    }
}

/// One problem in the problems file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub id: String,
    pub statement: String,
    pub solution: Option<String>,
    pub answer: String,
}

impl From<Problem> for ProblemRecord {
    fn from(p: Problem) -> Self {
        ProblemRecord {
            id: p.id,
            statement: p.statement,
            solution: p.reference_solution,
            answer: p.gold_answer,
        }
    }
}

impl From<ProblemRecord> for Problem {
    fn from(r: ProblemRecord) -> Self {
        Problem {
            id: r.id,
            statement: r.statement,
            reference_solution: r.solution,
            gold_answer: r.answer,
        }
    }
}

/// One knowledge point in the kps file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpRecord {
    pub problem_id: String,
    pub index: u32,
    pub knowledge: String,
    pub considerations: String,
    pub status: KpStatus,
}

impl From<KnowledgePoint> for KpRecord {
    fn from(k: KnowledgePoint) -> Self {
        KpRecord {
            problem_id: k.problem_id,
            index: k.index,
            knowledge: k.knowledge,
            considerations: k.considerations,
            status: k.status,
        }
    }
}

impl From<KpRecord> for KnowledgePoint {
    fn from(r: KpRecord) -> Self {
        KnowledgePoint {
            problem_id: r.problem_id,
            index: r.index,
            knowledge: r.knowledge,
            considerations: r.considerations,
            status: r.status,
        }
    }
}

/// One aggregated cell in the rollouts file: per-run correct counts for a
/// (problem, configuration) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedRolloutRecord {
    pub problem_id: String,
    pub config: Configuration,
    pub run_counts: Vec<u32>,
    pub samples_per_run: u32,
}

/// One raw per-sample rollout in the optional raw file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolloutRecord {
    pub problem_id: String,
    pub config: Configuration,
    pub run: u32,
    pub sample: u32,
    pub correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// One selection outcome in the selections file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub problem_id: String,
    pub strategy: Strategy,
    pub selected: Configuration,
    pub est_accuracy: Option<f64>,
    pub evaluations_requested: u64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

/// A request for rollouts at a fixed sampling geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationRequest {
    pub problem_id: String,
    pub config: Configuration,
    pub runs: u32,
    pub samples_per_run: u32,
}

impl EvaluationRequest {
    pub fn new(
        problem_id: impl Into<String>,
        config: Configuration,
        runs: u32,
        samples_per_run: u32,
    ) -> kphint_core::CoreResult<Self> {
        if runs == 0 {
            return Err(kphint_core::CoreError::ZeroParameter { field: "runs" });
        }
        if samples_per_run == 0 {
            return Err(kphint_core::CoreError::ZeroParameter {
                field: "samples_per_run",
            });
        }
        Ok(EvaluationRequest {
            problem_id: problem_id.into(),
            config,
            runs,
            samples_per_run,
        })
    }
}
