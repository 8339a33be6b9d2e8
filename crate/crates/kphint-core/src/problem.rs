use serde::{Deserialize, Serialize};

/// A reasoning task: statement, optional verified reference solution, and
/// the gold answer used for correctness scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub statement: String,
    /// Present only once the curation pipeline has produced and verified a
    /// correct solution for this problem.
    #[serde(default)]
    pub reference_solution: Option<String>,
    pub gold_answer: String,
}

impl Problem {
    pub fn new(
        id: impl Into<String>,
        statement: impl Into<String>,
        gold_answer: impl Into<String>,
    ) -> Self {
        Problem {
            id: id.into(),
            statement: statement.into(),
            reference_solution: None,
            gold_answer: gold_answer.into(),
        }
    }
}

/// Review status of a knowledge point as it moves through curation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpStatus {
    /// Freshly extracted, not yet leakage-checked.
    Raw,
    /// Passed the leakage review.
    Verified,
    /// Flagged as strongly coupled to its problem; awaiting manual revision.
    NeedsRevision,
    /// Manually revised after a failed review.
    Revised,
}

impl KpStatus {
    /// Only verified or revised KPs may enter selection or export.
    pub fn is_final(self) -> bool {
        matches!(self, KpStatus::Verified | KpStatus::Revised)
    }
}

/// An atomic hint unit: one general principle plus the caveats that matter
/// when applying it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgePoint {
    pub problem_id: String,
    pub index: u32,
    pub knowledge: String,
    pub considerations: String,
    pub status: KpStatus,
}
