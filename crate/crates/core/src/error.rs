use thiserror::Error;

/// Errors shared across the simulator, the network, and the trainer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegreeSequence(String),

    #[error("malformed edge list: {0}")]
    MalformedEdgeList(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("service {0} has no installation")]
    ServiceUnavailable(usize),

    #[error("no route from domain {src} to domain {dst}")]
    Unreachable { src: usize, dst: usize },

    #[error("action broadcasts {used} items but the slot budget is {budget}")]
    BudgetExceeded { used: usize, budget: usize },

    #[error("episode finished: slot {slot} is past horizon {horizon}")]
    EpisodeFinished { slot: u32, horizon: u32 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("replay memory holds {have} transitions, minibatch needs {need}")]
    InsufficientReplay { have: usize, need: usize },

    #[error("policy `{0}` requires a checkpoint file")]
    MissingCheckpoint(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
