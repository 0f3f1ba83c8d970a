use super::CoupletIndex;
use crate::error::{Error, Result};

/// Default per-step decay of bias values above one.
pub const DEFAULT_BIAS_DECAY: f64 = 0.0005;
/// Default increment applied to the successor of a selected couplet.
pub const DEFAULT_BIAS_INCREASE: f64 = 0.1;

// Residues this close to the floor are rounding noise from repeated
// subtraction; without the snap 1.05 would need 101 decay steps, not 100.
const FLOOR_SNAP: f64 = 1e-12;

/// Sequential bias: one multiplier per stored couplet, aligned with the
/// memory's flat index and never below one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiasState {
    values: Vec<f64>,
    generation: u64,
}

impl BiasState {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Memory generation this state is aligned with.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Pulls every value above one toward one by `decay`, clamping at one.
    pub fn decay(&mut self, decay: f64) {
        for v in self.values.iter_mut().filter(|v| **v > 1.0) {
            let next = *v - decay;
            *v = if next <= 1.0 + FLOOR_SNAP { 1.0 } else { next };
        }
    }

    /// Raises the bias of the immediate successor of every matched couplet.
    /// Matches at the end of their sequence have no successor.
    pub fn reinforce(&mut self, index: &CoupletIndex, matched: &[usize], increase: f64) -> Result<()> {
        if index.generation() != self.generation {
            return Err(Error::StaleView { view: index.generation(), current: self.generation });
        }
        if index.len() != self.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: index.len() });
        }
        if let Some(&bad) = matched.iter().find(|&&i| i >= self.values.len()) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.values.len() });
        }
        for &i in matched {
            if let Some(next) = index.successor(i) {
                self.values[next] += increase;
            }
        }
        Ok(())
    }

    pub(crate) fn extend_fresh(&mut self, n: usize) {
        self.values.resize(self.values.len() + n, 1.0);
    }

    pub(crate) fn drop_front(&mut self, n: usize) {
        self.values.drain(..n);
    }

    pub(crate) fn set_generation(&mut self, generation: u64) {
        self.generation = generation;
    }

    #[cfg(test)]
    pub(crate) fn from_values(values: Vec<f64>, generation: u64) -> Self {
        Self { values, generation }
    }
}
