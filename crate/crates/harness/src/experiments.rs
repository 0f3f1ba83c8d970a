//! The four batch experiments: agent comparison, capacity sweep with the
//! ratio table, and the forgetting ablation.

use std::fmt::Write as _;
use std::path::PathBuf;

use seqec::memory::Retention;

use crate::config::{AgentKind, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::metrics::MetricsRow;
use crate::plot::{emit_plots, emit_ratio_plot, emit_sweep_plots};
use crate::ratio::{performance_matrix, CapacityResult, RatioTable};
use crate::runner::{ensure_dir, run_experiment, ExperimentOutput};
use crate::stats::{bootstrap_ci, episodes_to_fraction, fill_episodes, mean_fill_episode, run_final_means, Interval, Metric};

/// Share of the final-window reward used for the sample-efficiency episode.
pub const REACH_FRACTION: f64 = 0.9;
const CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub label: String,
    pub final_reward: Interval,
    pub final_entropy: Interval,
    pub final_steps: Interval,
    /// First episode whose smoothed reward reaches 90% of the final mean.
    pub episodes_to_90: Option<usize>,
    pub mean_fill_episode: Option<f64>,
    pub runs_filled: usize,
}

pub fn summarize(cfg: &ExperimentConfig, label: &str, rows: &[MetricsRow]) -> AgentSummary {
    let window = cfg.final_window();
    let ci = |metric: Metric, salt: u64| {
        let values = run_final_means(rows, metric, window);
        bootstrap_ci(&values, cfg.bootstrap_resamples, CI_LEVEL, cfg.master_seed ^ salt)
    };
    let fills = fill_episodes(rows);
    AgentSummary {
        label: label.into(),
        final_reward: ci(Metric::Reward, 0x5EED_0001),
        final_entropy: ci(Metric::Entropy, 0x5EED_0002),
        final_steps: ci(Metric::Steps, 0x5EED_0003),
        episodes_to_90: episodes_to_fraction(rows, cfg.smoothing_window, window, REACH_FRACTION),
        mean_fill_episode: mean_fill_episode(rows).filter(|_| fills.iter().any(Option::is_some)),
        runs_filled: fills.iter().filter(|f| f.is_some()).count(),
    }
}

pub fn format_summaries(summaries: &[AgentSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} {:>26} {:>26} {:>10} {:>8} {:>12}", "agent", "final reward [95% CI]", "final entropy [95% CI]", "steps", "ep@90%", "fill ep");
    let iv = |i: &Interval| format!("{:.4} [{:.4}, {:.4}]", i.mean, i.lo, i.hi);
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<18} {:>26} {:>26} {:>10.1} {:>8} {:>12}",
            s.label,
            iv(&s.final_reward),
            iv(&s.final_entropy),
            s.final_steps.mean,
            s.episodes_to_90.map_or("-".into(), |e| e.to_string()),
            s.mean_fill_episode.map_or("-".into(), |e| format!("{e:.1} ({})", s.runs_filled)),
        );
    }
    out
}

fn write_text(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(HarnessError::io(&path))?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub outputs: Vec<ExperimentOutput>,
    pub summaries: Vec<AgentSummary>,
    pub files: Vec<PathBuf>,
}

/// SEC, NSEC and MFEC under one configuration and one set of run seeds.
pub fn compare(cfg: &ExperimentConfig) -> Result<CompareReport> {
    ensure_dir(&cfg.output)?;
    let mut outputs = Vec::new();
    for agent in AgentKind::ALL {
        let c = ExperimentConfig { agent, ..cfg.clone() };
        outputs.push(run_experiment(&c, &format!("compare_{agent}"))?);
    }
    let summaries: Vec<AgentSummary> = outputs.iter().map(|o| summarize(cfg, &o.label, &o.rows())).collect();
    let mut files: Vec<PathBuf> = outputs.iter().map(|o| o.csv.clone()).collect();
    let plot_dir = cfg.output.join("compare_plots");
    files.extend(emit_plots(&files.clone(), &plot_dir, cfg.smoothing_window, &[Metric::Reward, Metric::Steps])?);
    files.push(write_text(cfg.output.join("compare_summary.txt"), &format_summaries(&summaries))?);
    Ok(CompareReport { outputs, summaries, files })
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub sec: Vec<CapacityResult>,
    pub nsec: Vec<CapacityResult>,
    pub ratio: RatioTable,
    pub summaries: Vec<AgentSummary>,
    pub files: Vec<PathBuf>,
}

/// SEC and NSEC with Fixed retention at every capacity, plus the ratio table.
pub fn sweep_memory(cfg: &ExperimentConfig, capacities: &[usize]) -> Result<SweepReport> {
    if capacities.is_empty() {
        return Err(HarnessError::Invalid("capacity list is empty".into()));
    }
    ensure_dir(&cfg.output)?;
    let (mut sec, mut nsec, mut summaries, mut files) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &capacity in capacities {
        for agent in [AgentKind::Sec, AgentKind::Nsec] {
            let c = ExperimentConfig { agent, ec_capacity: capacity, retention: Retention::Fixed, ..cfg.clone() };
            let out = run_experiment(&c, &format!("sweep_{agent}_{capacity}"))?;
            let rows = out.rows();
            summaries.push(summarize(cfg, &out.label, &rows));
            files.push(out.csv);
            let target = if agent == AgentKind::Sec { &mut sec } else { &mut nsec };
            target.push(CapacityResult { capacity, rows });
        }
    }
    let ratio = performance_matrix(&sec, &nsec, cfg.final_window());
    let ratio_csv = cfg.output.join("ratio_table.csv");
    ratio.write_csv(&ratio_csv)?;
    files.push(ratio_csv);
    let ratio_svg = cfg.output.join("ratio_table.svg");
    emit_ratio_plot(&ratio, &ratio_svg)?;
    files.push(ratio_svg);
    files.extend(emit_sweep_plots(&sec, &nsec, &cfg.output, cfg.smoothing_window)?);
    files.push(write_text(cfg.output.join("sweep_summary.txt"), &format_summaries(&summaries))?);
    Ok(SweepReport { sec, nsec, ratio, summaries, files })
}

#[derive(Debug, Clone)]
pub struct ForgettingReport {
    pub outputs: Vec<ExperimentOutput>,
    pub summaries: Vec<AgentSummary>,
    pub files: Vec<PathBuf>,
}

/// SEC and NSEC with Fixed and Fifo retention at the configured capacity.
pub fn forgetting(cfg: &ExperimentConfig) -> Result<ForgettingReport> {
    ensure_dir(&cfg.output)?;
    let mut outputs = Vec::new();
    for retention in [Retention::Fixed, Retention::Fifo] {
        for agent in [AgentKind::Sec, AgentKind::Nsec] {
            let c = ExperimentConfig { agent, retention, ..cfg.clone() };
            outputs.push(run_experiment(&c, &format!("forgetting_{agent}_{retention}"))?);
        }
    }
    let summaries: Vec<AgentSummary> = outputs.iter().map(|o| summarize(cfg, &o.label, &o.rows())).collect();
    let mut files: Vec<PathBuf> = outputs.iter().map(|o| o.csv.clone()).collect();
    let plot_dir = cfg.output.join("forgetting_plots");
    files.extend(emit_plots(&files.clone(), &plot_dir, cfg.smoothing_window, &[Metric::Reward, Metric::Entropy])?);
    files.push(write_text(cfg.output.join("forgetting_summary.txt"), &format_summaries(&summaries))?);
    Ok(ForgettingReport { outputs, summaries, files })
}
