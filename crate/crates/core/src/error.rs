use thiserror::Error;

/// Errors raised by the channel analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("non-finite probability at index {index}")]
    NonFiniteProbability { index: usize },

    #[error("empty alphabet")]
    EmptyAlphabet,

    #[error("expected {expected} axes, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("transition row (x1={x1}, x2={x2}) sums to {sum}, expected 1")]
    RowSum { x1: usize, x2: usize, sum: f64 },

    #[error("negative transition probability {value} at (x1={x1}, x2={x2}, y1={y1}, y2={y2})")]
    NegativeTransition {
        x1: usize,
        x2: usize,
        y1: usize,
        y2: usize,
        value: f64,
    },

    #[error("precondition not met: {requirement} ({verdict})")]
    PreconditionUnmet {
        requirement: &'static str,
        verdict: String,
    },

    #[error("unknown condition id `{0}`")]
    UnknownCondition(String),

    #[error("unknown builtin channel `{0}`")]
    UnknownChannel(String),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("objective returned a non-finite value at {at}")]
    NonFiniteObjective { at: String },

    #[error("linear system for x1={x1} is not identifiable (rank {rank} < {unknowns})")]
    NonIdentifiable {
        x1: usize,
        rank: usize,
        unknowns: usize,
    },

    #[error("Markov chain (X1,X2)-Y2'-Y1 violated by {max_violation:e}")]
    MarkovViolation { max_violation: f64 },

    #[error("binary alphabets required, got {0}")]
    NotBinary(String),
}

pub type Result<T> = std::result::Result<T, Error>;
