use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants map one-to-one onto the stable numeric codes exposed through the
/// C interface, so new variants must only ever be appended.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("field error: {0}")]
    Field(String),
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not invariant under the operator")]
    NotInvariant,
    #[error("survivor set is not information-complete")]
    SingularSystem,
    #[error("repair scheme invalid: {0}")]
    SchemeInvalid(String),
    #[error("stacked repair system is singular")]
    SingularStack,
    #[error("value out of range: {0}")]
    Range(String),
    #[error("family of {count} matrices exceeds the cap of {cap}")]
    FamilyTooLarge { count: u128, cap: u64 },
    #[error("block {block} is flagged standard but does not span the space")]
    NonSpanningBlock { block: usize },
    #[error("parameter error: {0}")]
    Param(String),
    #[error("exhaustive search estimate {estimate} exceeds the cap of {cap}")]
    TooLarge { estimate: u128, cap: u128 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
