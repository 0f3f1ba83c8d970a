use rand::Rng;

use crate::error::{Error, Result};

/// Probability vector over the discrete action set.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn uniform(action_count: usize) -> Self {
        Self { probs: vec![1.0 / action_count as f64; action_count] }
    }

    /// Takes `probs` as-is after checking it is a distribution (tolerance 1e-9).
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if let Some((action, &value)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
            return Err(Error::NegativeValue { action, value });
        }
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn action_count(&self) -> usize {
        self.probs.len()
    }
}

/// Normalizes non-negative action values; all-zero values give the uniform
/// distribution.
pub fn action_distribution(q: &[f64]) -> Result<ActionDistribution> {
    if q.is_empty() {
        return Err(Error::InvalidConfig("action space must be non-empty".into()));
    }
    if let Some((action, &value)) = q.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeValue { action, value });
    }
    let total: f64 = q.iter().sum();
    if total > 0.0 {
        Ok(ActionDistribution { probs: q.iter().map(|v| v / total).collect() })
    } else {
        Ok(ActionDistribution::uniform(q.len()))
    }
}

/// Inverse-CDF draw from `dist`. Zero-probability actions are never returned.
pub fn select_action<R: Rng + ?Sized>(dist: &ActionDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    for (a, &p) in dist.probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return a;
        }
    }
    // Rounding left the cumulative sum just under u.
    dist.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
