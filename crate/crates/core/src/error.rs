use thiserror::Error;

/// Errors raised by the completion engine.
///
/// Verification failures (axiom violations, non-commuting diagrams) are not
/// errors; they are returned as reports. These variants cover malformed input
/// and broken preconditions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid rational {0:?}: expected \"num/den\"")]
    ParseRational(String),

    #[error("malformed element for {space}: {detail}")]
    MalformedElement { space: String, detail: String },

    #[error("p must be prime (got {0})")]
    NotPrime(u64),

    #[error("invalid finite table: {0}")]
    InvalidFiniteTable(String),

    #[error("unknown space kind {0:?}")]
    UnknownKind(String),

    #[error("base spaces differ: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("generator {generator} not available on {space}: {detail}")]
    GeneratorMismatch {
        generator: String,
        space: String,
        detail: String,
    },

    #[error("square root of negative rational {0}")]
    NegativeSqrt(String),

    #[error(
        "regularity violated at indices ({i}, {j}): distance {observed} exceeds bound {bound}"
    )]
    RegularityViolation {
        i: u32,
        j: u32,
        observed: String,
        bound: String,
    },

    #[error("invalid category: {0}")]
    InvalidCategory(String),

    #[error("rigidity fails at object {object}: non-identity mono endomorphism {morphism}")]
    RigidityViolated { object: String, morphism: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
