//! Curve smoothing and run-level summary statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metrics::MetricsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Reward,
    Steps,
    Entropy,
}

impl Metric {
    pub fn of(self, row: &MetricsRow) -> f64 {
        match self {
            Metric::Reward => row.reward,
            Metric::Steps => row.steps as f64,
            Metric::Entropy => row.mean_entropy,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Reward => "reward",
            Metric::Steps => "steps",
            Metric::Entropy => "entropy",
        }
    }
}

/// Per-episode mean across runs.
pub fn episode_means(rows: &[MetricsRow], metric: Metric) -> Vec<f64> {
    let episodes = rows.iter().map(|r| r.episode + 1).max().unwrap_or(0);
    let mut sum = vec![0.0; episodes];
    let mut count = vec![0usize; episodes];
    for r in rows {
        sum[r.episode] += metric.of(r);
        count[r.episode] += 1;
    }
    sum.iter().zip(&count).map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 }).collect()
}

/// Centered moving average; windows are truncated at the edges. An even
/// width reaches one further to the right than to the left.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let left = (window - 1) / 2;
    let right = window / 2;
    let mut prefix = Vec::with_capacity(series.len() + 1);
    prefix.push(0.0);
    for v in series {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right + 1).min(series.len());
            if window == 1 {
                series[i]
            } else {
                (prefix[hi] - prefix[lo]) / (hi - lo) as f64
            }
        })
        .collect()
}

/// Cross-run mean reward per episode, smoothed with a centered window.
pub fn aggregate(rows: &[MetricsRow], window: usize) -> Vec<f64> {
    aggregate_metric(rows, Metric::Reward, window)
}

pub fn aggregate_metric(rows: &[MetricsRow], metric: Metric, window: usize) -> Vec<f64> {
    moving_average(&episode_means(rows, metric), window)
}

/// Each run's mean of `metric` over its last `window` episodes, in run order.
pub fn run_final_means(rows: &[MetricsRow], metric: Metric, window: usize) -> Vec<f64> {
    let runs = rows.iter().map(|r| r.run_id + 1).max().unwrap_or(0);
    let episodes = rows.iter().map(|r| r.episode + 1).max().unwrap_or(0);
    let start = episodes.saturating_sub(window);
    let mut sum = vec![0.0; runs];
    let mut count = vec![0usize; runs];
    for r in rows.iter().filter(|r| r.episode >= start) {
        sum[r.run_id] += metric.of(r);
        count[r.run_id] += 1;
    }
    sum.iter().zip(&count).filter(|(_, &c)| c > 0).map(|(s, &c)| s / c as f64).collect()
}

/// Mean over the last `window` episodes pooled across runs.
pub fn final_mean(rows: &[MetricsRow], metric: Metric, window: usize) -> f64 {
    let means = episode_means(rows, metric);
    let tail = &means[means.len().saturating_sub(window)..];
    if tail.is_empty() {
        0.0
    } else {
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// True when `self` lies entirely above `other`.
    pub fn above(&self, other: &Interval) -> bool {
        self.lo > other.hi
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap interval for the mean of `values`.
pub fn bootstrap_ci(values: &[f64], resamples: usize, level: f64, seed: u64) -> Interval {
    assert!(!values.is_empty(), "bootstrap of an empty sample");
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Interval { mean, lo: quantile(&means, tail), hi: quantile(&means, 1.0 - tail) }
}

/// First index where `series` reaches `target`.
pub fn first_reaching(series: &[f64], target: f64) -> Option<usize> {
    series.iter().position(|&v| v >= target)
}

/// Episode at which the smoothed mean reward first reaches `fraction` of
/// the final-window mean reward.
pub fn episodes_to_fraction(rows: &[MetricsRow], smoothing: usize, final_window: usize, fraction: f64) -> Option<usize> {
    let target = fraction * final_mean(rows, Metric::Reward, final_window);
    first_reaching(&aggregate(rows, smoothing), target)
}

/// First episode with `memory_filled` set, per run in run order.
pub fn fill_episodes(rows: &[MetricsRow]) -> Vec<Option<usize>> {
    let runs = rows.iter().map(|r| r.run_id + 1).max().unwrap_or(0);
    let mut out = vec![None; runs];
    for r in rows.iter().filter(|r| r.memory_filled) {
        let slot: &mut Option<usize> = &mut out[r.run_id];
        if slot.is_none_or(|e| r.episode < e) {
            *slot = Some(r.episode);
        }
    }
    out
}

/// Mean fill episode, counting a run that never filled as `episodes`.
pub fn mean_fill_episode(rows: &[MetricsRow]) -> Option<f64> {
    let fills = fill_episodes(rows);
    if fills.is_empty() {
        return None;
    }
    let episodes = rows.iter().map(|r| r.episode + 1).max().unwrap_or(0);
    Some(fills.iter().map(|f| f.unwrap_or(episodes) as f64).sum::<f64>() / fills.len() as f64)
}
