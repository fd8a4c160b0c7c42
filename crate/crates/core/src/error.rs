use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} at step {step})")]
    Singular { step: usize, pivot: f64 },

    #[error("random instance stayed singular after {attempts} attempts")]
    SingularInstance { attempts: usize },

    #[error("degenerate H-geometry at direction {index}: <v,v>_H = {norm:e}")]
    SingularGeometry { index: usize, norm: f64 },

    #[error("block {block} of the decomposition is numerically singular")]
    DecompositionFailure { block: usize },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exhaustive search over {dim} variables exceeds the limit of {max}")]
    ProblemTooLarge { dim: usize, max: usize },

    #[error("heuristic solver called on an empty problem")]
    EmptyProblem,

    #[error("block {block}: {source}")]
    Block {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "solution lies outside the rhombus: |D_{index}| = {coefficient:e} exceeds {bound:e}"
    )]
    OutsideRhombus {
        index: usize,
        coefficient: f64,
        bound: f64,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
