use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QssError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("zero has no multiplicative inverse")]
    NoInverse,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("value {value} out of range for F_{modulus}")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("set {0} is not authorized")]
    NotAuthorized(String),

    #[error("set {0} is authorized; privacy audit needs an unauthorized set")]
    Authorized(String),

    #[error("participant mismatch: {0}")]
    ParticipantMismatch(String),

    #[error("unknown participant {0}")]
    UnknownParticipant(String),

    #[error("invalid monotone span program: {0}")]
    InvalidMsp(String),

    #[error("enumeration needs {needed} completions, bound is {bound}")]
    EnumerationBound { needed: u128, bound: u128 },

    #[error("invalid particle index {0} (expected 1, 2 or 3)")]
    InvalidParticle(u8),

    #[error("at least one decoy particle is required")]
    NoDecoys,

    #[error("decoy records do not match the channel sequence: {0}")]
    RecordMismatch(String),

    #[error("invalid tamper spec {0:?}")]
    InvalidTamper(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, QssError>;
