//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The stall fits in the lot in neither orientation.
    #[error("stall ({w} x {l}) fits in the lot in neither orientation")]
    NoFit { w: f64, l: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("unknown entrance id {0}")]
    UnknownEntrance(usize),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("unknown stall index {0}")]
    UnknownStall(usize),

    #[error("start stall {0} is marked occupied")]
    OccupiedStart(usize),

    #[error("layout {0} is infeasible: {1}")]
    InfeasibleLayout(usize, String),

    #[error("sequence/order length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
