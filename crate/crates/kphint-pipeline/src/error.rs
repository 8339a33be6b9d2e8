use kphint_core::CoreError;
use kphint_store::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid endpoint configuration: {message}")]
    Config { message: String },

    #[error("environment variable {var} is not set")]
    Env { var: String },

    #[error("transport failure for {tag}: {message}")]
    Transport { tag: String, message: String },

    #[error("problem {problem_id} unsolved after {attempts} attempt(s)")]
    Unsolved { problem_id: String, attempts: u32 },

    #[error("could not parse extraction reply for problem {problem_id}: {message}")]
    ExtractionParse {
        problem_id: String,
        message: String,
        raw: String,
    },

    #[error("could not parse review verdict for problem {problem_id} KP {kp_index}: {message}")]
    VerdictParse {
        problem_id: String,
        kp_index: u32,
        message: String,
        raw: String,
    },

    #[error("KP {index} of problem {problem_id} is not verified or revised")]
    NonFinalKp { problem_id: String, index: u32 },

    #[error("could not parse hint block: {message}")]
    HintParse { message: String },

    #[error("problem {problem_id} has no reference solution")]
    MissingSolution { problem_id: String },

    #[error("unknown problem {id}")]
    UnknownProblem { id: String },

    #[error("problem {problem_id} has no KP with index {index}")]
    MissingKp { problem_id: String, index: u32 },

    #[error(
        "evaluation of {config} for problem {problem_id} stopped at run {run} sample {sample}: \
         {message}; completed samples are persisted and the run can be resumed"
    )]
    PartialRun {
        problem_id: String,
        config: String,
        run: u32,
        sample: u32,
        message: String,
    },

    #[error(transparent)]
    Store(#[from] StoreError),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type PipelineResult<T> = Result<T, PipelineError>;
