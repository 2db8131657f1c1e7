use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("multiplication table is not associative at ({0}, {1}, {2})")]
    NonAssociativeTable(usize, usize, usize),
    #[error("bad identity: {0}")]
    BadIdentity(String),
    #[error("element index {0} out of range for group of order {1}")]
    ElementOutOfRange(usize, usize),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is not cyclic")]
    NotCyclic,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("complexity limit exceeded: {what} needs {needed} entries, budget is {limit}")]
    ComplexityLimitExceeded {
        what: String,
        needed: u128,
        limit: u128,
    },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("zero argument")]
    ZeroArgument,
    #[error("reciprocity violation: {0}")]
    ReciprocityViolation(String),
    #[error("unsupported magnitude: {0}")]
    UnsupportedMagnitude(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
