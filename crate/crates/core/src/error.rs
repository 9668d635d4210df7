use thiserror::Error;

use crate::Nat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("universe mismatch: {0}")]
    UniverseMismatch(String),

    #[error("boolean combination mixes sets over different universes")]
    MixedUniverse,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid filter presentation: {0}")]
    InvalidFilter(String),

    #[error("restriction carrier fails the co-ideal test: {0}")]
    ImproperRestriction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("search exhausted at horizon {horizon}: {what}")]
    Exhausted { what: String, horizon: Nat },

    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
