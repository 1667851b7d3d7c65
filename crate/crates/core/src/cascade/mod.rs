//! Root cascades, good-root transforms, concentration probing and the packing solver.

mod concentration;
mod good;
pub mod movelog;
mod search;
mod solver;

use thiserror::Error;

use crate::exchange::ExchangeError;
use crate::rainbow::ModelError;

pub use concentration::{
    addable_concentration, concentration_probe, concentration_probe_with, Concentration, Probe,
    ProbeLimits,
};
pub use good::{
    build_good_graph, good_transform, is_good, recolour, GoodGraph, GoodNode, GoodPath, GoodVertex,
};
pub use search::{
    apply_cascade, cascade_search, cascade_search_with, good_cascade_search, realise, CascadeStep,
    CascadeTrace, Landing, SearchLimits, SearchOutcome,
};
pub use solver::{pack_rainbow_bases, MovePolicy, SolveResult, SolverParams, StopReason};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CascadeError {
    #[error("level-bound violated: the recolouring graph has no terminal after {levels} levels")]
    LevelBoundViolated { levels: usize },
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("corrupted trace at step {step}: {reason}")]
    CorruptedTrace { step: usize, reason: String },
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("internal invariant breach: {0}")]
    InvariantBreach(String),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
