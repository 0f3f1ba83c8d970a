use super::AbsoluteGate;
use crate::error::{Error, Result};
use crate::memory::{DEFAULT_BIAS_DECAY, DEFAULT_BIAS_INCREASE};

#[derive(Debug, Clone, PartialEq)]
pub struct SecConfig {
    /// Absolute eligibility threshold.
    pub theta_abs: f64,
    /// Threshold on eligibility relative to the best score.
    pub theta_prop: f64,
    /// Temperature of the distance-to-reward discount.
    pub tau: f64,
    pub bias_increase: f64,
    pub bias_decay: f64,
    /// `false` freezes the bias at one (the non-sequential ablation).
    pub sequential_bias: bool,
    pub action_count: usize,
    pub absolute_gate: AbsoluteGate,
}

impl Default for SecConfig {
    fn default() -> Self {
        Self {
            theta_abs: 0.995,
            theta_prop: 0.98,
            tau: 0.9,
            bias_increase: DEFAULT_BIAS_INCREASE,
            bias_decay: DEFAULT_BIAS_DECAY,
            sequential_bias: true,
            action_count: 4,
            absolute_gate: AbsoluteGate::Similarity,
        }
    }
}

impl SecConfig {
    pub fn non_sequential() -> Self {
        Self { sequential_bias: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !in_unit(self.theta_abs) {
            return Err(Error::InvalidConfig(format!("theta_abs must lie in (0, 1], got {}", self.theta_abs)));
        }
        if !in_unit(self.theta_prop) {
            return Err(Error::InvalidConfig(format!("theta_prop must lie in (0, 1], got {}", self.theta_prop)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.bias_increase >= 0.0) || !(self.bias_decay >= 0.0) {
            return Err(Error::InvalidConfig("bias increase and decay must be non-negative".into()));
        }
        if self.action_count == 0 {
            return Err(Error::InvalidConfig("action space must be non-empty".into()));
        }
        Ok(())
    }
}
