use thiserror::Error;

use crate::bracket::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid format:\n{0}")]
    Invalid(ValidationReport),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("prize vector has {got} values but the format has {expected} placement classes")]
    PrizeArity { expected: usize, got: usize },

    #[error(
        "prize vector must be nonincreasing (position {position} is larger than its predecessor)"
    )]
    PrizeOrder { position: usize },

    #[error("prize values must be finite")]
    PrizeNotFinite,

    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),

    #[error("unknown entry slot `{0}`")]
    UnknownSlot(String),

    #[error("invalid standings: {0}")]
    Standings(String),

    #[error("invalid seeding: {0}")]
    Seeding(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed tally: {0}")]
    Tally(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
