use kphint_core::CoreError;
use kphint_store::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("subset size m must be at least 2, got {m}")]
    InvalidM { m: u32 },

    #[error("invalid bucket edges: {message}")]
    InvalidEdges { message: String },

    #[error("run {run} out of range (runs = {runs})")]
    RunOutOfRange { run: u32, runs: u32 },

    #[error("selection sets cover different problems (only in first: {only_a:?}, only in second: {only_b:?})")]
    IdMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("nothing to analyze: {what} is empty")]
    EmptyInput { what: &'static str },

    #[error("problem {problem_id} has no reference solution")]
    MissingSolution { problem_id: String },

    #[error("unknown problem {id}")]
    UnknownProblem { id: String },

    #[error("problem {problem_id} has no registered knowledge points")]
    NoKps { problem_id: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Store(#[from] StoreError),
}

pub type AnalysisResult<T> = Result<T, AnalysisError>;
