//! Model-free episodic control baseline.
//!
//! A per-action table keeps the best return ever observed after taking that
//! action in a state. Unseen states are valued by averaging the `k` nearest
//! stored entries for the action. Tables are bounded and evict the entry
//! accessed least recently.

use rand::{Rng, RngCore};

use crate::agent::{Agent, Decision};
use crate::error::{Error, Result};
use crate::memory::check_unit_box;
use crate::sec::{distance, ActionDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct MfecConfig {
    pub k: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub capacity_per_action: usize,
    pub action_count: usize,
    /// Break greedy ties uniformly at random instead of by lowest index.
    pub random_tie_break: bool,
}

impl Default for MfecConfig {
    fn default() -> Self {
        // 500 sequences x 50 couplets spread across 4 actions.
        Self { k: 11, epsilon: 0.005, gamma: 1.0, capacity_per_action: 6250, action_count: 4, random_tie_break: true }
    }
}

impl MfecConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in [0, 1], got {}", self.epsilon)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if self.capacity_per_action == 0 || self.action_count == 0 {
            return Err(Error::InvalidConfig("capacity and action count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct QEntry {
    state: Vec<f64>,
    q: f64,
    last_access: u64,
}

/// Bounded per-action value table.
#[derive(Debug, Clone)]
pub struct QMemory {
    tables: Vec<Vec<QEntry>>,
    capacity: usize,
    clock: u64,
}

impl QMemory {
    pub fn new(action_count: usize, capacity_per_action: usize) -> Self {
        Self { tables: vec![Vec::new(); action_count], capacity: capacity_per_action.max(1), clock: 0 }
    }

    pub fn len(&self, action: usize) -> usize {
        self.tables[action].len()
    }

    pub fn total_len(&self) -> usize {
        self.tables.iter().map(Vec::len).sum()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.tables.iter().any(|t| t.len() >= self.capacity)
    }

    /// Stored value for an exact state, if any.
    pub fn get(&self, state: &[f64], action: usize) -> Option<f64> {
        self.tables[action].iter().find(|e| e.state == state).map(|e| e.q)
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    /// Exact hit returns the stored value; otherwise the mean over the `k`
    /// nearest entries (ties go to the earlier entry). Empty table gives 0.
    pub fn estimate(&mut self, state: &[f64], action: usize, k: usize) -> f64 {
        let now = self.tick();
        let table = &mut self.tables[action];
        if table.is_empty() {
            return 0.0;
        }
        let mut ranked: Vec<(f64, usize)> = table
            .iter()
            .enumerate()
            .map(|(i, e)| (distance(state, &e.state).unwrap_or(f64::INFINITY), i))
            .collect();
        if let Some(&(_, i)) = ranked.iter().find(|(d, _)| *d == 0.0) {
            table[i].last_access = now;
            return table[i].q;
        }
        let k = k.min(ranked.len());
        let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < ranked.len() {
            ranked.select_nth_unstable_by(k - 1, by_distance);
        }
        let nearest = &mut ranked[..k];
        nearest.sort_unstable_by(by_distance);
        let mut sum = 0.0;
        for &(_, i) in nearest.iter() {
            table[i].last_access = now;
            sum += table[i].q;
        }
        sum / k as f64
    }

    /// Max-rule update; novel states are inserted, evicting the least
    /// recently accessed entry when the table is full.
    pub fn update(&mut self, state: &[f64], action: usize, value: f64) {
        let now = self.tick();
        let capacity = self.capacity;
        let table = &mut self.tables[action];
        if let Some(e) = table.iter_mut().find(|e| e.state == state) {
            e.q = e.q.max(value);
            e.last_access = now;
            return;
        }
        if table.len() >= capacity {
            let lru = table
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| e.last_access)
                .map(|(i, _)| i)
                .expect("full table is non-empty");
            table.remove(lru);
        }
        table.push(QEntry { state: state.to_vec(), q: value, last_access: now });
    }
}

/// One visited step of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
}

/// Ordered steps of one episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeTrace {
    pub steps: Vec<TraceStep>,
}

impl EpisodeTrace {
    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }
}

/// Discounted returns, computed backward from the last step.
pub fn compute_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (t, r) in rewards.iter().enumerate().rev() {
        acc = r + gamma * acc;
        out[t] = acc;
    }
    out
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (a, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = a;
        }
    }
    best
}

/// Epsilon-greedy; greedy ties go to the lowest action index.
pub fn mfec_select<R: Rng + ?Sized>(estimates: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        rng.random_range(0..estimates.len())
    } else {
        argmax(estimates)
    }
}

fn tied_best(estimates: &[f64]) -> impl Iterator<Item = usize> + '_ {
    let best = estimates[argmax(estimates)];
    (0..estimates.len()).filter(move |&a| estimates[a] == best)
}

/// Like [`mfec_select`], but a greedy tie is broken uniformly at random.
pub fn mfec_select_random_ties<R: Rng + ?Sized>(estimates: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return rng.random_range(0..estimates.len());
    }
    let ties: Vec<usize> = tied_best(estimates).collect();
    ties[rng.random_range(0..ties.len())]
}

/// Law of [`mfec_select`] (or of [`mfec_select_random_ties`] when
/// `random_ties` is set) for the given estimates.
pub fn epsilon_greedy_distribution(estimates: &[f64], epsilon: f64, random_ties: bool) -> ActionDistribution {
    let m = estimates.len();
    let mut probs = vec![epsilon / m as f64; m];
    if random_ties {
        let ties: Vec<usize> = tied_best(estimates).collect();
        let share = (1.0 - epsilon) / ties.len() as f64;
        for a in ties {
            probs[a] += share;
        }
    } else {
        probs[argmax(estimates)] += 1.0 - epsilon;
    }
    ActionDistribution::from_probs(probs).expect("epsilon-greedy law is a distribution")
}

#[derive(Debug, Clone)]
pub struct MfecAgent {
    cfg: MfecConfig,
    memory: QMemory,
    trace: EpisodeTrace,
    estimates: Vec<f64>,
}

impl MfecAgent {
    pub fn new(cfg: MfecConfig) -> Result<Self> {
        cfg.validate()?;
        let memory = QMemory::new(cfg.action_count, cfg.capacity_per_action);
        let estimates = vec![0.0; cfg.action_count];
        Ok(Self { cfg, memory, trace: EpisodeTrace::default(), estimates })
    }

    pub fn config(&self) -> &MfecConfig {
        &self.cfg
    }

    pub fn memory(&self) -> &QMemory {
        &self.memory
    }

    fn learn_from_trace(&mut self) {
        let trace = std::mem::take(&mut self.trace);
        let returns = compute_returns(&trace.rewards(), self.cfg.gamma);
        for (step, ret) in trace.steps.iter().zip(returns) {
            self.memory.update(&step.state, step.action, ret);
        }
    }
}

impl Agent for MfecAgent {
    fn act(&mut self, features: &[f64], rng: &mut dyn RngCore) -> Result<Decision> {
        check_unit_box(features)?;
        for a in 0..self.cfg.action_count {
            self.estimates[a] = self.memory.estimate(features, a, self.cfg.k);
        }
        let action = if self.cfg.random_tie_break {
            mfec_select_random_ties(&self.estimates, self.cfg.epsilon, rng)
        } else {
            mfec_select(&self.estimates, self.cfg.epsilon, rng)
        };
        let policy = epsilon_greedy_distribution(&self.estimates, self.cfg.epsilon, self.cfg.random_tie_break);
        let fallback = self.memory.total_len() == 0;
        self.trace.steps.push(TraceStep { state: features.to_vec(), action, reward: 0.0 });
        Ok(Decision { action, policy, fallback })
    }

    fn observe_outcome(&mut self, reward: f64, done: bool) -> Result<()> {
        if let Some(last) = self.trace.steps.last_mut() {
            last.reward = reward;
        }
        if done {
            self.learn_from_trace();
        }
        Ok(())
    }

    fn memory_size(&self) -> usize {
        self.memory.total_len()
    }

    fn memory_full(&self) -> bool {
        self.memory.is_full()
    }
}
