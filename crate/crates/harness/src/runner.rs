//! Episode loop, per-run seeding and multi-run experiments.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use seqec::maze::{MazeEnv, MazeMap};
use seqec::mfec::{MfecAgent, MfecConfig};
use seqec::sec::SecAgent;
use seqec::Agent;

use crate::config::{AgentKind, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::metrics::{policy_entropy, write_metrics_file, MetricsRow};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Documented in every CSV header.
pub const SEED_RULE: &str = "run_seed = splitmix64(master_seed + (run_id + 1) * 0x9E3779B97F4A7C15)";

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_id`; depends on nothing else, so runs are isolated.
pub fn run_seed(master_seed: u64, run_id: usize) -> u64 {
    splitmix64(master_seed.wrapping_add((run_id as u64 + 1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Per-episode measurements before they are tagged with run and episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub reward: f64,
    pub steps: usize,
    pub mean_entropy: f64,
    pub ec_sequence_count: usize,
    pub memory_filled: bool,
}

/// Plays one episode from a fresh reset. Steps count decisions; entropy is
/// averaged over them, a uniform fallback counting as `ln M`.
pub fn run_episode(agent: &mut dyn Agent, env: &mut MazeEnv, rng: &mut dyn RngCore) -> Result<EpisodeRecord> {
    let mut obs = env.reset(rng);
    let mut steps = 0;
    let mut entropy = 0.0;
    loop {
        let decision = agent.act(&obs, rng)?;
        steps += 1;
        // running mean, exact when every step has the same entropy
        entropy += (policy_entropy(&decision.policy) - entropy) / steps as f64;
        let outcome = env.step(decision.action)?;
        agent.observe_outcome(outcome.reward, outcome.done)?;
        obs = outcome.observation;
        if outcome.done {
            return Ok(EpisodeRecord {
                reward: outcome.reward,
                steps,
                mean_entropy: entropy,
                ec_sequence_count: agent.memory_size(),
                memory_filled: agent.memory_full(),
            });
        }
    }
}

enum Controller {
    Sec(Box<SecAgent>),
    Mfec(Box<MfecAgent>),
}

impl Controller {
    fn new(cfg: &ExperimentConfig, action_count: usize) -> Result<Self> {
        Ok(match cfg.agent {
            AgentKind::Sec | AgentKind::Nsec => {
                let sec = seqec::sec::SecConfig { action_count, ..cfg.sec_config() };
                Controller::Sec(Box::new(SecAgent::new(sec, cfg.memory_config())?))
            }
            AgentKind::Mfec => Controller::Mfec(Box::new(MfecAgent::new(MfecConfig { action_count, ..cfg.mfec.clone() })?)),
        })
    }

    fn agent(&mut self) -> &mut dyn Agent {
        match self {
            Controller::Sec(a) => a.as_mut(),
            Controller::Mfec(a) => a.as_mut(),
        }
    }

    fn dump(&self) -> Option<String> {
        match self {
            Controller::Sec(a) => {
                let mut out = Vec::new();
                a.memory().write_dump(&mut out).ok()?;
                String::from_utf8(out).ok()
            }
            Controller::Mfec(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_id: usize,
    pub seed: u64,
    pub rows: Vec<MetricsRow>,
    /// Final episodic memory in dump form, when requested and available.
    pub ec_dump: Option<String>,
}

impl RunResult {
    /// First episode after which the memory reported full.
    pub fn fill_episode(&self) -> Option<usize> {
        self.rows.iter().find(|r| r.memory_filled).map(|r| r.episode)
    }
}

pub fn run_single(cfg: &ExperimentConfig, map: &Arc<MazeMap>, run_id: usize) -> Result<RunResult> {
    let seed = run_seed(cfg.master_seed, run_id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = MazeEnv::new(Arc::clone(map), cfg.env.clone())?;
    let mut controller = Controller::new(cfg, env.action_count())?;
    let mut rows = Vec::with_capacity(cfg.episodes);
    for episode in 0..cfg.episodes {
        let r = run_episode(controller.agent(), &mut env, &mut rng)?;
        rows.push(MetricsRow {
            run_id,
            episode,
            reward: r.reward,
            steps: r.steps,
            mean_entropy: r.mean_entropy,
            ec_sequence_count: r.ec_sequence_count,
            memory_filled: r.memory_filled,
        });
    }
    let ec_dump = if cfg.dump_ec { controller.dump() } else { None };
    Ok(RunResult { run_id, seed, rows, ec_dump })
}

/// All runs of `cfg`, in run order whatever the scheduling.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let map = cfg.load_map()?;
    if cfg.parallel {
        (0..cfg.runs).into_par_iter().map(|i| run_single(cfg, &map, i)).collect()
    } else {
        (0..cfg.runs).map(|i| run_single(cfg, &map, i)).collect()
    }
}

pub fn metadata(cfg: &ExperimentConfig, label: &str, runs: &[RunResult]) -> Vec<(String, String)> {
    let mut meta = vec![("label".to_string(), label.to_string())];
    meta.extend(cfg.echo().into_iter().map(|(k, v)| (k.to_string(), v)));
    meta.push(("seed_rule".into(), SEED_RULE.into()));
    meta.extend(runs.iter().map(|r| (format!("run_seed.{}", r.run_id), r.seed.to_string())));
    meta
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub label: String,
    pub csv: PathBuf,
    pub runs: Vec<RunResult>,
}

impl ExperimentOutput {
    pub fn rows(&self) -> Vec<MetricsRow> {
        self.runs.iter().flat_map(|r| r.rows.iter().copied()).collect()
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))
}

/// Runs every simulation of `cfg` and writes `<output>/<label>.csv`.
pub fn run_experiment(cfg: &ExperimentConfig, label: &str) -> Result<ExperimentOutput> {
    cfg.validate()?;
    cfg.load_map()?;
    ensure_dir(&cfg.output)?;
    let runs = simulate(cfg)?;
    let csv = cfg.output.join(format!("{label}.csv"));
    let rows: Vec<MetricsRow> = runs.iter().flat_map(|r| r.rows.iter().copied()).collect();
    write_metrics_file(&csv, &metadata(cfg, label, &runs), &rows)?;
    for run in &runs {
        if let Some(dump) = &run.ec_dump {
            let path = cfg.output.join(format!("{label}_ec_run{}.txt", run.run_id));
            std::fs::write(&path, dump).map_err(HarnessError::io(&path))?;
        }
    }
    Ok(ExperimentOutput { label: label.into(), csv, runs })
}
