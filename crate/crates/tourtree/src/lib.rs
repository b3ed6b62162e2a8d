//! Tournaments, oriented trees, and the machinery for embedding trees into
//! tournaments: generators, exhaustive and randomized containment oracles,
//! cluster allocation, regularity and matching primitives, embedding
//! pipelines, and seeded Monte Carlo experiments.
//!
//! Conventions used throughout:
//!
//! * Vertices are `0..n`, contiguous. Cluster indices are `1..=k` (modular
//!   arithmetic on clusters wraps within that range).
//! * A tournament on `n` vertices is stored as out-neighbour bit rows; its
//!   wire form is the upper-triangular bit string over pairs `(i, j)`, `i < j`,
//!   in lexicographic order, bit set meaning `i beats j`. See [`digraph`].
//! * Randomness is always explicit: callers pass a `u64` seed, per-trial
//!   streams are derived with [`rng::derive_seed`], and parallel runs reduce
//!   in a fixed order so results do not depend on thread count.

pub mod allocation;
pub mod bitset;
pub mod digraph;
pub mod embed;
pub mod exec;
pub mod experiments;
pub mod oracle;
pub mod otree;
pub mod rng;

use serde::{Deserialize, Serialize};

/// Hard errors: malformed inputs, violated preconditions, cost-guard refusals.
///
/// Domain-level "no result" outcomes (an embedding search that proves
/// non-containment, a pipeline stage that gives up) are not `Error`s; they are
/// structured values such as [`embed::StageFailure`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("refusing: {0}")]
    Refused(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
    pub fn refused(msg: impl Into<String>) -> Self {
        Error::Refused(msg.into())
    }
}

/// Version tag written into experiment manifests and run records so an
/// artifact can be traced to the code and wire formats that produced it.
pub const FORMAT_VERSION: u32 = 1;

/// A structured stage failure from a multi-stage construction. Not a bug and
/// not bad input: the run hit a stage whose hypothesis did not hold for this
/// instance (or whose retry budget ran out) and reports where and why.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub detail: String,
    /// Named counts describing the failure site (set sizes, shortfalls, ...).
    pub counts: Vec<(String, i64)>,
}

impl StageFailure {
    pub fn new(stage: &str, detail: impl Into<String>) -> Self {
        StageFailure {
            stage: stage.to_string(),
            detail: detail.into(),
            counts: Vec::new(),
        }
    }
    pub fn count(mut self, name: &str, value: i64) -> Self {
        self.counts.push((name.to_string(), value));
        self
    }
}

impl std::fmt::Display for StageFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage `{}`: {}", self.stage, self.detail)?;
        if !self.counts.is_empty() {
            write!(f, " (")?;
            for (i, (k, v)) in self.counts.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{k}={v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
