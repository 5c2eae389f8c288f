//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the modeled region (bounding box radius {radius})")]
    OutsideModeledRegion { radius: i64 },

    #[error("unsupported rank {0} (only 1 and 2 are modeled)")]
    UnsupportedRank(usize),

    #[error("cell is not a chamber")]
    NotAChamber,

    #[error("degenerate segment (coincident endpoints)")]
    DegenerateSegment,

    #[error("chart id {0} out of range")]
    ChartOutOfRange(usize),

    #[error("atlas is not saturated for the center: {0}")]
    NotSaturated(String),

    #[error("invalid atlas: {0}")]
    InvalidAtlas(String),

    #[error("no chart contains both inputs")]
    NoCommonChart,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid scene: {0}")]
    Scene(String),

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
