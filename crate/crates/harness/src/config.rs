//! Experiment configuration: defaults, `key = value` files and overrides.
//!
//! A config file holds one `key = value` pair per line; `#` starts a comment.
//! Every key can also be given on the command line as `--key value`. Unknown
//! keys are rejected in both places.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use seqec::maze::{EnvConfig, MazeMap};
use seqec::memory::{MemoryConfig, Retention, DEFAULT_BUFFER_CAPACITY, DEFAULT_EC_CAPACITY};
use seqec::mfec::MfecConfig;
use seqec::sec::{AbsoluteGate, SecConfig};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    Sec,
    Nsec,
    Mfec,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Sec, AgentKind::Nsec, AgentKind::Mfec];

    pub fn label(self) -> &'static str {
        match self {
            AgentKind::Sec => "sec",
            AgentKind::Nsec => "nsec",
            AgentKind::Mfec => "mfec",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sec" => Ok(AgentKind::Sec),
            "nsec" => Ok(AgentKind::Nsec),
            "mfec" => Ok(AgentKind::Mfec),
            other => Err(format!("unknown agent '{other}' (expected sec, nsec or mfec)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub agent: AgentKind,
    /// `sequential_bias` is ignored here; it follows `agent`.
    pub sec: SecConfig,
    pub mfec: MfecConfig,
    pub env: EnvConfig,
    pub buffer_capacity: usize,
    pub ec_capacity: usize,
    pub retention: Retention,
    pub episodes: usize,
    pub runs: usize,
    pub master_seed: u64,
    /// `None` uses the bundled double T-maze.
    pub map: Option<PathBuf>,
    pub output: PathBuf,
    /// Centered moving-average width for plots.
    pub smoothing_window: usize,
    /// Share of trailing episodes used for summary statistics.
    pub final_fraction: f64,
    /// Capacity grid for `sweep`.
    pub capacities: Vec<usize>,
    pub bootstrap_resamples: usize,
    /// Run simulations on the rayon pool; output does not depend on it.
    pub parallel: bool,
    /// Write each run's final episodic memory next to the CSV.
    pub dump_ec: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            agent: AgentKind::Sec,
            sec: SecConfig::default(),
            mfec: MfecConfig::default(),
            env: EnvConfig::default(),
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            ec_capacity: DEFAULT_EC_CAPACITY,
            retention: Retention::Fixed,
            episodes: 5000,
            runs: 20,
            master_seed: 0,
            map: None,
            output: PathBuf::from("results"),
            smoothing_window: 50,
            final_fraction: 0.1,
            capacities: vec![125, 250, 500, 1000],
            bootstrap_resamples: 10_000,
            parallel: true,
            dump_ec: false,
        }
    }
}

/// Every settable key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("agent", "sec, nsec or mfec"),
    ("theta_abs", "absolute gating threshold"),
    ("theta_prop", "proportional gating threshold"),
    ("tau", "temperature of the distance-to-reward discount"),
    ("bias_increase", "bias added to successors of selected couplets"),
    ("bias_decay", "per-step bias decay toward one"),
    ("absolute_gate", "similarity or eligibility"),
    ("k", "MFEC neighbours"),
    ("epsilon", "MFEC exploration rate"),
    ("gamma", "MFEC discount"),
    ("mfec_capacity", "MFEC entries per action"),
    ("random_tie_break", "MFEC breaks greedy ties at random"),
    ("reward_base", "goal reward at t = 0"),
    ("reward_decay_per_step", "goal reward lost per timestep"),
    ("max_steps", "episode timestep cap"),
    ("action_repeat", "timesteps per decision"),
    ("buffer_capacity", "short-term buffer length"),
    ("ec_capacity", "episodic memory capacity in sequences"),
    ("retention", "fixed or fifo"),
    ("episodes", "episodes per run"),
    ("runs", "independent runs"),
    ("master_seed", "seed all run seeds derive from"),
    ("map", "ASCII map file; empty for the bundled maze"),
    ("output", "output directory"),
    ("smoothing_window", "plot smoothing width in episodes"),
    ("final_fraction", "trailing share of episodes for summaries"),
    ("capacities", "comma-separated capacity grid for sweep"),
    ("bootstrap_resamples", "resamples for confidence intervals"),
    ("parallel", "run simulations in parallel"),
    ("dump_ec", "write final episodic memories"),
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| HarnessError::BadValue { key: key.into(), value: value.into(), reason: e.to_string() })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(HarnessError::BadValue { key: key.into(), value: value.into(), reason: "expected true or false".into() }),
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "agent" => self.agent = parse(key, v)?,
            "theta_abs" => self.sec.theta_abs = parse(key, v)?,
            "theta_prop" => self.sec.theta_prop = parse(key, v)?,
            "tau" => self.sec.tau = parse(key, v)?,
            "bias_increase" => self.sec.bias_increase = parse(key, v)?,
            "bias_decay" => self.sec.bias_decay = parse(key, v)?,
            "absolute_gate" => self.sec.absolute_gate = parse::<AbsoluteGate>(key, v)?,
            "k" => self.mfec.k = parse(key, v)?,
            "epsilon" => self.mfec.epsilon = parse(key, v)?,
            "gamma" => self.mfec.gamma = parse(key, v)?,
            "mfec_capacity" => self.mfec.capacity_per_action = parse(key, v)?,
            "random_tie_break" => self.mfec.random_tie_break = parse_bool(key, v)?,
            "reward_base" => self.env.reward_base = parse(key, v)?,
            "reward_decay_per_step" => self.env.reward_decay_per_step = parse(key, v)?,
            "max_steps" => self.env.max_steps = parse(key, v)?,
            "action_repeat" => self.env.action_repeat = parse(key, v)?,
            "buffer_capacity" => self.buffer_capacity = parse(key, v)?,
            "ec_capacity" => self.ec_capacity = parse(key, v)?,
            "retention" => self.retention = parse::<Retention>(key, v)?,
            "episodes" => self.episodes = parse(key, v)?,
            "runs" => self.runs = parse(key, v)?,
            "master_seed" => self.master_seed = parse(key, v)?,
            "map" => self.map = (!v.is_empty()).then(|| PathBuf::from(v)),
            "output" => self.output = PathBuf::from(v),
            "smoothing_window" => self.smoothing_window = parse(key, v)?,
            "final_fraction" => self.final_fraction = parse(key, v)?,
            "capacities" => {
                self.capacities = v.split(',').map(|c| parse(key, c.trim())).collect::<Result<_>>()?;
            }
            "bootstrap_resamples" => self.bootstrap_resamples = parse(key, v)?,
            "parallel" => self.parallel = parse_bool(key, v)?,
            "dump_ec" => self.dump_ec = parse_bool(key, v)?,
            _ => return Err(HarnessError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "agent" => self.agent.to_string(),
            "theta_abs" => self.sec.theta_abs.to_string(),
            "theta_prop" => self.sec.theta_prop.to_string(),
            "tau" => self.sec.tau.to_string(),
            "bias_increase" => self.sec.bias_increase.to_string(),
            "bias_decay" => self.sec.bias_decay.to_string(),
            "absolute_gate" => self.sec.absolute_gate.to_string(),
            "k" => self.mfec.k.to_string(),
            "epsilon" => self.mfec.epsilon.to_string(),
            "gamma" => self.mfec.gamma.to_string(),
            "mfec_capacity" => self.mfec.capacity_per_action.to_string(),
            "random_tie_break" => self.mfec.random_tie_break.to_string(),
            "reward_base" => self.env.reward_base.to_string(),
            "reward_decay_per_step" => self.env.reward_decay_per_step.to_string(),
            "max_steps" => self.env.max_steps.to_string(),
            "action_repeat" => self.env.action_repeat.to_string(),
            "buffer_capacity" => self.buffer_capacity.to_string(),
            "ec_capacity" => self.ec_capacity.to_string(),
            "retention" => self.retention.to_string(),
            "episodes" => self.episodes.to_string(),
            "runs" => self.runs.to_string(),
            "master_seed" => self.master_seed.to_string(),
            "map" => self.map.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "output" => self.output.display().to_string(),
            "smoothing_window" => self.smoothing_window.to_string(),
            "final_fraction" => self.final_fraction.to_string(),
            "capacities" => self.capacities.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
            "bootstrap_resamples" => self.bootstrap_resamples.to_string(),
            "parallel" => self.parallel.to_string(),
            "dump_ec" => self.dump_ec.to_string(),
            _ => return None,
        })
    }

    /// Keys that change simulation results, for output metadata. Scheduling
    /// and output location are left out so they cannot change file bytes.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        const SKIP: [&str; 4] = ["output", "parallel", "dump_ec", "capacities"];
        KEYS.iter().filter(|(k, _)| !SKIP.contains(k)).map(|&(k, _)| (k, self.get(k).expect("every key has a value"))).collect()
    }

    /// Applies a `key = value` file on top of `self`.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        self.apply_text(&text, path)
    }

    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::Syntax { path: origin.into(), line: n + 1, text: raw.into() });
            };
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn sec_config(&self) -> SecConfig {
        SecConfig { sequential_bias: self.agent != AgentKind::Nsec, ..self.sec.clone() }
    }

    pub fn memory_config(&self) -> MemoryConfig {
        MemoryConfig { buffer_capacity: self.buffer_capacity, ec_capacity: self.ec_capacity, retention: self.retention }
    }

    /// Number of trailing episodes in the summary window, at least one.
    pub fn final_window(&self) -> usize {
        final_window(self.episodes, self.final_fraction)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(HarnessError::Invalid(m));
        if self.episodes == 0 || self.runs == 0 {
            return invalid("episodes and runs must be positive".into());
        }
        if !(self.final_fraction > 0.0 && self.final_fraction <= 1.0) {
            return invalid(format!("final_fraction must lie in (0, 1], got {}", self.final_fraction));
        }
        if self.smoothing_window == 0 {
            return invalid("smoothing_window must be at least 1".into());
        }
        if self.bootstrap_resamples == 0 {
            return invalid("bootstrap_resamples must be positive".into());
        }
        if self.capacities.is_empty() {
            return invalid("capacities must not be empty".into());
        }
        self.sec_config().validate()?;
        self.mfec.validate()?;
        self.env.validate()?;
        self.memory_config().build()?;
        Ok(())
    }

    pub fn load_map(&self) -> Result<Arc<MazeMap>> {
        match &self.map {
            None => Ok(Arc::new(MazeMap::bundled())),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
                let map = MazeMap::parse(&text).map_err(|source| HarnessError::Map { path: path.clone(), source })?;
                Ok(Arc::new(map))
            }
        }
    }
}

pub fn final_window(episodes: usize, fraction: f64) -> usize {
    ((episodes as f64 * fraction).ceil() as usize).clamp(1, episodes.max(1))
}
