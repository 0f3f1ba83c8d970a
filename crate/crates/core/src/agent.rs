use rand::RngCore;

use crate::error::Result;
use crate::sec::ActionDistribution;

/// Outcome of one decision step.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: usize,
    /// Distribution the action was drawn from.
    pub policy: ActionDistribution,
    /// True when memory offered nothing and the policy fell back to uniform.
    pub fallback: bool,
}

/// Common driving surface for every controller in the crate.
pub trait Agent: Send {
    fn act(&mut self, features: &[f64], rng: &mut dyn RngCore) -> Result<Decision>;

    /// Reports the reward that followed the last action.
    fn observe_outcome(&mut self, reward: f64, done: bool) -> Result<()>;

    /// Stored units: sequences for the sequence controllers, table entries for MFEC.
    fn memory_size(&self) -> usize;

    fn memory_full(&self) -> bool;
}
