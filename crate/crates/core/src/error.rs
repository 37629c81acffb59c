use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the planning library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario field `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },

    #[error("invalid generation spec `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("failed to parse scenario file {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("task {task} on tier {tier} has no `{component}` allocated")]
    MissingAllocation { task: usize, tier: crate::latency::Tier, component: &'static str },

    #[error("beamformer for user {user} is the zero vector")]
    ZeroBeamformer { user: usize },

    #[error("user {user} is not served by RU {ru}")]
    NotServed { user: usize, ru: usize },

    #[error("non-positive dual `{dual}` for a task with positive {tier} share")]
    NonPositiveDual { dual: &'static str, tier: crate::latency::Tier },

    #[error("enumeration of {count} decision vectors exceeds the cap of {cap}; use the dual solver instead")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("invalid sweep: {0}")]
    Sweep(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
