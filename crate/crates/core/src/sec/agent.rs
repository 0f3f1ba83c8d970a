use rand::RngCore;

use super::policy::{action_distribution, select_action};
use super::retrieval::{accumulate_q, scan_gated};
use super::SecConfig;
use crate::agent::{Agent, Decision};
use crate::error::{Error, Result};
use crate::memory::{check_unit_box, BiasState, Couplet, EpisodicMemory, MemoryConfig, ShortTermBuffer};

/// Sequential episodic control agent; the non-sequential ablation when
/// `SecConfig::sequential_bias` is off.
#[derive(Debug, Clone)]
pub struct SecAgent {
    cfg: SecConfig,
    buffer: ShortTermBuffer,
    memory: EpisodicMemory,
    bias: BiasState,
    dim: Option<usize>,
    // scratch, reused every step
    gated: Vec<(usize, f64)>,
    matched: Vec<usize>,
    q: Vec<f64>,
}

impl SecAgent {
    pub fn new(cfg: SecConfig, memory: MemoryConfig) -> Result<Self> {
        cfg.validate()?;
        let (buffer, memory) = memory.build()?;
        let bias = memory.fresh_bias();
        let q = vec![0.0; cfg.action_count];
        Ok(Self { cfg, buffer, memory, bias, dim: None, gated: Vec::new(), matched: Vec::new(), q })
    }

    pub fn config(&self) -> &SecConfig {
        &self.cfg
    }

    pub fn memory(&self) -> &EpisodicMemory {
        &self.memory
    }

    pub fn bias(&self) -> &BiasState {
        &self.bias
    }

    pub fn buffer(&self) -> &ShortTermBuffer {
        &self.buffer
    }

    /// Action values for `features` under the current memory and bias,
    /// without side effects.
    pub fn action_values(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_features(features)?;
        let mut gated = Vec::new();
        scan_gated(features, self.memory.index(), self.bias.values(), &self.cfg, &mut gated);
        let mut q = vec![0.0; self.cfg.action_count];
        accumulate_q(&gated, self.memory.index(), self.cfg.tau, &mut q);
        Ok(q)
    }

    fn check_features(&self, features: &[f64]) -> Result<()> {
        check_unit_box(features)?;
        let expected = self.dim.unwrap_or(features.len());
        if features.len() != expected || features.is_empty() {
            return Err(Error::DimensionMismatch { expected, found: features.len() });
        }
        Ok(())
    }
}

impl Agent for SecAgent {
    fn act(&mut self, features: &[f64], rng: &mut dyn RngCore) -> Result<Decision> {
        self.check_features(features)?;
        self.dim = Some(features.len());

        let index = self.memory.index();
        scan_gated(features, index, self.bias.values(), &self.cfg, &mut self.gated);
        accumulate_q(&self.gated, index, self.cfg.tau, &mut self.q);

        let policy = action_distribution(&self.q)?;
        let action = select_action(&policy, rng);
        self.buffer.push(Couplet { state: features.to_vec(), action });

        if self.cfg.sequential_bias {
            self.matched.clear();
            self.matched.extend(self.gated.iter().map(|&(i, _)| i).filter(|&i| index.action(i) == action));
            self.bias.reinforce(index, &self.matched, self.cfg.bias_increase)?;
            self.bias.decay(self.cfg.bias_decay);
        }

        Ok(Decision { action, policy, fallback: self.gated.is_empty() })
    }

    fn observe_outcome(&mut self, reward: f64, done: bool) -> Result<()> {
        if reward > 0.0 && !self.buffer.is_empty() {
            let sequence = self.buffer.drain();
            self.memory.store(&mut self.bias, sequence, reward)?;
        }
        if done {
            self.buffer.clear();
        }
        Ok(())
    }

    fn memory_size(&self) -> usize {
        self.memory.len()
    }

    fn memory_full(&self) -> bool {
        self.memory.is_full()
    }
}
