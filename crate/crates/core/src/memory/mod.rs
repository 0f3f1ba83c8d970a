//! Short-term event buffer, long-term episodic store and the sequential bias
//! that rides along with it.

mod bias;
mod buffer;
mod episodic;

pub use bias::{BiasState, DEFAULT_BIAS_DECAY, DEFAULT_BIAS_INCREASE};
pub use buffer::{ShortTermBuffer, DEFAULT_BUFFER_CAPACITY};
pub use episodic::{
    CoupletIndex, CoupletView, EpisodicMemory, Retention, Sequence, StoreOutcome, DEFAULT_EC_CAPACITY,
};

use crate::error::{Error, Result};

/// One state-action event.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplet {
    pub state: Vec<f64>,
    pub action: usize,
}

impl Couplet {
    pub fn new(state: Vec<f64>, action: usize, action_count: usize) -> Result<Self> {
        check_unit_box(&state)?;
        if action >= action_count {
            return Err(Error::ActionOutOfRange { action, action_count });
        }
        Ok(Self { state, action })
    }
}

/// Every component must lie in the unit interval.
pub(crate) fn check_unit_box(state: &[f64]) -> Result<()> {
    match state.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(Error::StateOutOfRange { index, value: state[index] }),
        None => Ok(()),
    }
}

/// Sizes and retention policy for the two memory stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryConfig {
    pub buffer_capacity: usize,
    pub ec_capacity: usize,
    pub retention: Retention,
}

impl Default for MemoryConfig {
    fn default() -> Self {
        Self { buffer_capacity: DEFAULT_BUFFER_CAPACITY, ec_capacity: DEFAULT_EC_CAPACITY, retention: Retention::Fixed }
    }
}

impl MemoryConfig {
    pub fn build(&self) -> Result<(ShortTermBuffer, EpisodicMemory)> {
        if self.buffer_capacity == 0 {
            return Err(Error::InvalidConfig("short-term buffer capacity must be positive".into()));
        }
        let memory = EpisodicMemory::new(self.ec_capacity, self.retention)?.with_max_sequence_len(self.buffer_capacity);
        Ok((ShortTermBuffer::new(self.buffer_capacity), memory))
    }
}
