use thiserror::Error;

use crate::tree::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex {0} not found")]
    NotFound(VertexId),
    #[error("the root belongs to no branch")]
    NoBranch,
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

impl TreeError {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        TreeError::Parse {
            position,
            message: message.into(),
        }
    }
}

/// First illegal move found by move validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("agent {agent} cannot move from {from} to {to}")]
pub struct MoveViolation {
    pub agent: usize,
    pub from: VertexId,
    pub to: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("{strategy}: phase {phase} needs {needed} fresh agents but only {available} remain")]
    Infeasible {
        strategy: &'static str,
        phase: u32,
        needed: usize,
        available: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("expected {expected} moves, got {got}")]
    WrongAgentCount { expected: usize, got: usize },
    #[error(transparent)]
    IllegalMove(#[from] MoveViolation),
    #[error("cannot attach at visited vertex {0}")]
    AttachAtVisited(VertexId),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("round {round}: {source}")]
    InRound {
        round: u32,
        #[source]
        source: Box<GameError>,
    },
}

impl GameError {
    pub(crate) fn in_round(self, round: u32) -> Self {
        match self {
            e @ GameError::InRound { .. } => e,
            e => GameError::InRound {
                round,
                source: Box::new(e),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OfflineError {
    #[error("no exploration within {cap} rounds")]
    ExceededCap { cap: u32 },
    #[error("state space exceeded the limit of {limit} states")]
    ResourceLimit { limit: usize },
    #[error("tree with {n} vertices is too large for exhaustive search")]
    TooLarge { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("transcript integrity: {0}")]
    Integrity(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// Umbrella error for the CLI and FFI layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
