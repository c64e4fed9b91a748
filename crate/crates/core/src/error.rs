use thiserror::Error;

/// Errors raised anywhere in the core crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed algebra document at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("operation `{op}`: entry out of range at table index {index} (value {value}, carrier size {size})")]
    EntryOutOfRange {
        op: String,
        index: usize,
        value: usize,
        size: usize,
    },

    #[error("operation `{op}` has arity {arity}: expected table length {expected}, found {found}")]
    TableLength {
        op: String,
        arity: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate operation name `{0}`")]
    DuplicateOperation(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("unknown operation `{0}`")]
    UnknownOperation(String),

    #[error("operation `{op}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },

    #[error("variable x{index} is not covered by an assignment of length {len}")]
    UnboundVariable { index: usize, len: usize },

    #[error("element {element} is outside the carrier of size {size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("carrier mismatch: {left} vs {right}")]
    CarrierMismatch { left: usize, right: usize },

    #[error("signatures of `{left}` and `{right}` differ")]
    SignatureMismatch { left: String, right: String },

    #[error("{what} exceeds cap {limit} (required or reached {reached})")]
    CapExceeded {
        what: String,
        limit: usize,
        reached: usize,
    },

    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("relation is not reflexive")]
    NotReflexive,

    #[error("relation is not compatible with operation `{0}`")]
    NotCompatible(String),

    #[error("operator `{operator}` produced a non-admissible relation: {reason}")]
    OperatorOutput { operator: String, reason: String },

    #[error("operator `{0}` applied to a non-admissible relation in strict mode")]
    NonAdmissibleArgument(String),

    #[error("unbound name `{0}`")]
    UnboundName(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: impl Into<String>, limit: usize, reached: usize) -> Self {
        Error::CapExceeded {
            what: what.into(),
            limit,
            reached,
        }
    }

    /// True for the cap family of errors (mapped to their own exit code by the CLI).
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
