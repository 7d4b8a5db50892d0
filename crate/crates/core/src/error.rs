use thiserror::Error;

use crate::family::Line;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank {rank} out of range for n = {n} (n! = {limit})")]
    RankOutOfRange { rank: u64, n: usize, limit: u64 },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("n = {n} exceeds the limit of {limit} for {what}")]
    Capacity { what: &'static str, n: usize, limit: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("permutation is not in T(X,Y)")]
    NotInRestriction,

    #[error("no strong line found (best {}, non-large fraction {best_p:.4})", .best.map_or("none".to_string(), |l| l.to_string()))]
    NoStrongLine { best: Option<Line>, best_p: f64 },

    #[error("strong lines {first} and {second} conflict: {non_conflicting} non-conflicting large pairs exceed q = {q:.4} of m(m-1) = {pairs}")]
    LineConflict {
        first: Line,
        second: Line,
        non_conflicting: u64,
        pairs: u64,
        q: f64,
    },

    #[error("strong-line entries cluster at the medium value {gamma:.4}; no dictatorship can be read off")]
    MediumValueCluster { gamma: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
