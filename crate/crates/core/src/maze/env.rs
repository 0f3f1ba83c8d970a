use std::sync::Arc;

use rand::Rng;

use super::{MazeMap, Move, ObservationEncoder, Position, WallSensorEncoder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    /// Reward for reaching the goal at t = 0.
    pub reward_base: f64,
    /// Subtracted from the goal reward per elapsed timestep.
    pub reward_decay_per_step: f64,
    pub max_steps: usize,
    /// Timesteps each decision is held for.
    pub action_repeat: usize,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self { reward_base: 3.0, reward_decay_per_step: 0.001, max_steps: 1000, action_repeat: 1 }
    }
}

impl EnvConfig {
    /// The goal reward must stay non-negative for the whole episode.
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 || self.action_repeat == 0 {
            return Err(Error::InvalidConfig("max_steps and action_repeat must be positive".into()));
        }
        if !(self.reward_base > 0.0) || !(self.reward_decay_per_step >= 0.0) {
            return Err(Error::InvalidConfig("reward_base must be positive and reward decay non-negative".into()));
        }
        let floor = self.reward_base - self.reward_decay_per_step * self.max_steps as f64;
        if floor < 0.0 {
            return Err(Error::InvalidConfig(format!("goal reward would reach {floor} before the step cap")));
        }
        Ok(())
    }

    /// Reward for reaching the goal after `t` timesteps.
    pub fn goal_reward(&self, t: usize) -> f64 {
        self.reward_base - self.reward_decay_per_step * t as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvState {
    pub position: Position,
    pub t: usize,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// Episodic maze: random start cell, sparse time-decayed goal reward, step cap.
#[derive(Debug, Clone)]
pub struct MazeEnv {
    map: Arc<MazeMap>,
    cfg: EnvConfig,
    encoder: Arc<dyn ObservationEncoder>,
    state: EnvState,
}

impl MazeEnv {
    pub fn new(map: Arc<MazeMap>, cfg: EnvConfig) -> Result<Self> {
        Self::with_encoder(map, cfg, Arc::new(WallSensorEncoder))
    }

    pub fn with_encoder(map: Arc<MazeMap>, cfg: EnvConfig, encoder: Arc<dyn ObservationEncoder>) -> Result<Self> {
        cfg.validate()?;
        let position = map.starts()[0];
        // Finished until the first reset.
        let state = EnvState { position, t: 0, done: true };
        Ok(Self { map, cfg, encoder, state })
    }

    pub fn map(&self) -> &MazeMap {
        &self.map
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> EnvState {
        self.state
    }

    pub fn action_count(&self) -> usize {
        Move::ALL.len()
    }

    pub fn observation_dim(&self) -> usize {
        self.encoder.dim()
    }

    /// Encodes the current state.
    pub fn observe(&self) -> Vec<f64> {
        self.encoder.encode(&self.map, self.state.position)
    }

    /// Starts a new episode on a uniformly chosen start cell.
    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64> {
        let starts = self.map.starts();
        let position = starts[rng.random_range(0..starts.len())];
        self.reset_to(position)
    }

    /// Starts a new episode at `position`.
    pub fn reset_to(&mut self, position: Position) -> Vec<f64> {
        self.state = EnvState { position, t: 0, done: false };
        self.observe()
    }

    pub fn step(&mut self, action: usize) -> Result<StepResult> {
        if self.state.done {
            return Err(Error::EpisodeFinished);
        }
        let mv = Move::from_index(action).ok_or(Error::ActionOutOfRange { action, action_count: Move::ALL.len() })?;
        for _ in 0..self.cfg.action_repeat {
            if let Some(next) = self.map.neighbour(self.state.position, mv) {
                self.state.position = next;
            }
            if self.map.is_goal(self.state.position) {
                break;
            }
        }
        self.state.t = (self.state.t + self.cfg.action_repeat).min(self.cfg.max_steps);

        let reward = if self.map.is_goal(self.state.position) {
            self.state.done = true;
            self.cfg.goal_reward(self.state.t)
        } else {
            self.state.done = self.state.t >= self.cfg.max_steps;
            0.0
        };
        Ok(StepResult { observation: self.observe(), reward, done: self.state.done })
    }
}
