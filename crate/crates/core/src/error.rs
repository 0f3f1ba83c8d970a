use thiserror::Error;

/// Contract violations raised by the memory, control and environment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state component {index} = {value} lies outside [0, 1]")]
    StateOutOfRange { index: usize, value: f64 },

    #[error("action {action} out of range for an action space of size {action_count}")]
    ActionOutOfRange { action: usize, action_count: usize },

    #[error("vector length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot store an empty sequence")]
    EmptySequence,

    #[error("sequence of length {length} exceeds the short-term buffer capacity {capacity}")]
    SequenceTooLong { length: usize, capacity: usize },

    #[error("stored sequences need a strictly positive reward, got {0}")]
    NonPositiveReward(f64),

    #[error("couplet view is stale: built at generation {view}, memory is at {current}")]
    StaleView { view: u64, current: u64 },

    #[error("flat index {index} out of range for {len} stored couplets")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("negative action value {value} for action {action}")]
    NegativeValue { action: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("episode already finished; reset the environment first")]
    EpisodeFinished,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
