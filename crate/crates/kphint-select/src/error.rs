use kphint_core::CoreError;
use kphint_store::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SelectError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Store(#[from] StoreError),

    #[error("no accuracy table for problem `{problem_id}`")]
    MissingTable { problem_id: String },

    #[error("epsilon {value} outside [0, 1]")]
    InvalidEpsilon { value: f64 },

    #[error("delta {value} outside [0, 1]")]
    InvalidDelta { value: f64 },

    #[error("enumerable set C has {size} members, above the cap of {cap}; refusing to search")]
    CssCapExceeded { size: u32, cap: u32 },

    #[error("exhaustive search over {n_kps} KPs exceeds cap {cap}")]
    ExhaustiveCapExceeded { n_kps: u32, cap: u32 },
}

pub type SelectResult<T> = Result<T, SelectError>;
