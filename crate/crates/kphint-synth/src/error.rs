use kphint_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("world `{problem_id}` is invalid: {message}")]
    InvalidWorld { problem_id: String, message: String },

    #[error("no synthetic world for problem `{problem_id}`")]
    UnknownWorld { problem_id: String },

    #[error("exhaustive search over {n_kps} KPs exceeds cap {cap}")]
    CapExceeded { n_kps: u32, cap: u32 },

    #[error("invalid generator parameter {field}: {message}")]
    InvalidParam {
        field: &'static str,
        message: String,
    },
}

pub type SynthResult<T> = Result<T, SynthError>;
