use std::fmt;
use std::str::FromStr;

use super::SecConfig;
use crate::error::{Error, Result};
use crate::memory::CoupletIndex;

/// Quantity the absolute threshold is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbsoluteGate {
    /// Raw similarity `1 - d`; the bias only enters the proportional test.
    Similarity,
    /// Bias-weighted eligibility `G`.
    Eligibility,
}

impl fmt::Display for AbsoluteGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbsoluteGate::Similarity => "similarity",
            AbsoluteGate::Eligibility => "eligibility",
        })
    }
}

impl FromStr for AbsoluteGate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "similarity" => Ok(AbsoluteGate::Similarity),
            "eligibility" => Ok(AbsoluteGate::Eligibility),
            other => Err(format!("unknown absolute gate '{other}' (expected similarity or eligibility)")),
        }
    }
}

/// Eligibility scores for one query plus the couplets that survived gating.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EligibilityReport {
    pub scores: Vec<f64>,
    /// Flat indices passing both thresholds, ascending.
    pub gated: Vec<usize>,
    /// Best score over all stored couplets, 0 for an empty memory.
    pub g_max: f64,
    /// Best score among couplets passing the absolute test; the
    /// proportional test divides by it.
    pub reference: f64,
}

#[inline]
pub(crate) fn mean_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    sum / a.len() as f64
}

/// Mean absolute component difference; lies in [0, 1] for unit-box states.
pub fn distance(query: &[f64], stored: &[f64]) -> Result<f64> {
    if query.len() != stored.len() {
        return Err(Error::DimensionMismatch { expected: query.len(), found: stored.len() });
    }
    if query.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    Ok(mean_abs_diff(query, stored))
}

/// `(1 - d) * B` element-wise.
pub fn eligibility(distances: &[f64], bias: &[f64]) -> Result<Vec<f64>> {
    if distances.len() != bias.len() {
        return Err(Error::DimensionMismatch { expected: distances.len(), found: bias.len() });
    }
    Ok(distances.iter().zip(bias).map(|(d, b)| (1.0 - d) * b).collect())
}

fn passes_absolute(distance: f64, score: f64, cfg: &SecConfig) -> bool {
    match cfg.absolute_gate {
        AbsoluteGate::Similarity => 1.0 - distance >= cfg.theta_abs,
        AbsoluteGate::Eligibility => score >= cfg.theta_abs,
    }
}

/// Winner-takes-all selection: a couplet is gated when it passes the
/// absolute threshold and its score is at least `theta_prop` of the best
/// score among absolute passers. With [`AbsoluteGate::Eligibility`] that best
/// score is the global maximum whenever anything passes.
pub fn gate(distances: &[f64], scores: Vec<f64>, cfg: &SecConfig) -> Result<EligibilityReport> {
    if distances.len() != scores.len() {
        return Err(Error::DimensionMismatch { expected: scores.len(), found: distances.len() });
    }
    let g_max = scores.iter().copied().fold(0.0_f64, f64::max);
    let reference = distances
        .iter()
        .zip(&scores)
        .filter(|&(&d, &g)| passes_absolute(d, g, cfg))
        .map(|(_, &g)| g)
        .fold(0.0_f64, f64::max);
    let gated = if reference > 0.0 {
        (0..scores.len())
            .filter(|&i| passes_absolute(distances[i], scores[i], cfg) && scores[i] / reference >= cfg.theta_prop)
            .collect()
    } else {
        Vec::new()
    };
    Ok(EligibilityReport { scores, gated, g_max, reference })
}

// Slack on the early-exit bound so that rounding in the partial sums can
// never drop a couplet the exact test would keep.
const EXIT_SLACK: f64 = 1e-9;

#[inline]
fn bounded_abs_sum(a: &[f64], b: &[f64], limit: f64) -> Option<f64> {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += (x - y).abs();
        if acc > limit {
            return None;
        }
    }
    Some(acc)
}

/// Fused scan + gate: writes `(flat index, score)` for every gated couplet.
/// Same result as `distance` -> `eligibility` -> `gate`, but rows that cannot
/// pass the absolute test are abandoned early.
pub(crate) fn scan_gated(query: &[f64], index: &CoupletIndex, bias: &[f64], cfg: &SecConfig, out: &mut Vec<(usize, f64)>) {
    out.clear();
    if index.is_empty() {
        return;
    }
    let n = query.len() as f64;
    match cfg.absolute_gate {
        AbsoluteGate::Similarity => {
            // A passing row differs by at most `limit` in every component, so
            // only rows with a nearby first feature need scanning.
            let limit = n * (1.0 - cfg.theta_abs) + EXIT_SLACK;
            let dim = index.dim();
            let features = index.features();
            for &i in index.near_first(query[0], limit) {
                let i = i as usize;
                if let Some(sum) = bounded_abs_sum(query, &features[i * dim..(i + 1) * dim], limit) {
                    let d = sum / n;
                    if 1.0 - d >= cfg.theta_abs {
                        out.push((i, (1.0 - d) * bias[i]));
                    }
                }
            }
            out.sort_unstable_by_key(|&(i, _)| i);
        }
        AbsoluteGate::Eligibility => {
            let rows = index.features().chunks_exact(index.dim());
            for (i, (row, &b)) in rows.zip(bias).enumerate() {
                let limit = n * (1.0 - cfg.theta_abs / b) + EXIT_SLACK;
                if limit < 0.0 {
                    continue;
                }
                if let Some(sum) = bounded_abs_sum(query, row, limit) {
                    let g = (1.0 - sum / n) * b;
                    if g >= cfg.theta_abs {
                        out.push((i, g));
                    }
                }
            }
        }
    }
    let reference = out.iter().map(|&(_, g)| g).fold(0.0_f64, f64::max);
    if reference > 0.0 {
        out.retain(|&(_, g)| g / reference >= cfg.theta_prop);
    } else {
        out.clear();
    }
}

/// Adds each gated couplet's reward-relative, end-discounted contribution to
/// the value of its stored action.
pub(crate) fn accumulate_q(gated: &[(usize, f64)], index: &CoupletIndex, tau: f64, q: &mut [f64]) {
    q.iter_mut().for_each(|v| *v = 0.0);
    let r_max = gated.iter().map(|&(i, _)| index.reward(i)).fold(0.0_f64, f64::max);
    if r_max <= 0.0 {
        return;
    }
    for &(i, g) in gated {
        let len = index.seq_length(i) as f64;
        let to_end = (len - 1.0 - index.position(i) as f64) / len;
        q[index.action(i)] += g * (index.reward(i) / r_max) * (-to_end / tau).exp();
    }
}

/// Per-action value estimates from the gated couplets of `report`.
pub fn q_estimates(report: &EligibilityReport, index: &CoupletIndex, cfg: &SecConfig) -> Result<Vec<f64>> {
    if report.scores.len() != index.len() {
        return Err(Error::DimensionMismatch { expected: index.len(), found: report.scores.len() });
    }
    if let Some(&bad) = report.gated.iter().find(|&&i| i >= index.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: index.len() });
    }
    if let Some(&i) = report.gated.iter().find(|&&i| index.action(i) >= cfg.action_count) {
        return Err(Error::ActionOutOfRange { action: index.action(i), action_count: cfg.action_count });
    }
    let gated: Vec<(usize, f64)> = report.gated.iter().map(|&i| (i, report.scores[i])).collect();
    let mut q = vec![0.0; cfg.action_count];
    accumulate_q(&gated, index, cfg.tau, &mut q);
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{Couplet, EpisodicMemory, Retention};

    fn cfg() -> SecConfig {
        SecConfig::default()
    }

    fn literal() -> SecConfig {
        SecConfig { absolute_gate: AbsoluteGate::Eligibility, ..SecConfig::default() }
    }

    /// Gate unbiased scores (similarity == score).
    fn gate_unbiased(scores: Vec<f64>, cfg: &SecConfig) -> EligibilityReport {
        let distances: Vec<f64> = scores.iter().map(|g| 1.0 - g).collect();
        gate(&distances, scores, cfg).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(distance(&[0.0; 4], &[1.0; 4]).unwrap(), 1.0);
        assert!((distance(&[0.2, 0.6], &[0.4, 0.2]).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(distance(&[0.1], &[0.1, 0.2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eligibility_examples() {
        let g = eligibility(&[0.3, 0.0, 1.0], &[1.0, 1.05, 2.0]).unwrap();
        assert!((g[0] - 0.7).abs() < 1e-15);
        assert_eq!(g[1], 1.05);
        assert_eq!(g[2], 0.0);
        assert!(eligibility(&[0.1], &[]).is_err());
    }

    #[test]
    fn gate_needs_both_thresholds() {
        for c in [cfg(), literal()] {
            let r = gate(&[0.0, 0.01, 0.5], vec![1.0, 0.99, 0.5], &c).unwrap();
            assert_eq!(r.gated, vec![0]);
            assert_eq!(r.g_max, 1.0);
        }
    }

    #[test]
    fn gate_keeps_ties() {
        assert_eq!(gate_unbiased(vec![1.0, 1.0], &cfg()).gated, vec![0, 1]);
    }

    #[test]
    fn gate_on_empty_memory() {
        let r = gate(&[], vec![], &cfg()).unwrap();
        assert!(r.gated.is_empty());
        assert_eq!(r.g_max, 0.0);
        assert!(gate_unbiased(vec![0.0, 0.0], &cfg()).gated.is_empty());
    }

    #[test]
    fn biased_exact_match_beats_unbiased_ones() {
        // 1.0 clears the absolute bar but is < 0.98 of a biased 1.1.
        let r = gate(&[0.0, 0.0, 0.0], vec![1.1, 1.0, 1.08], &cfg()).unwrap();
        assert_eq!(r.gated, vec![0, 2]);
    }

    #[test]
    fn bias_cannot_lift_a_dissimilar_couplet_over_the_absolute_bar() {
        // d = 0.1 with B = 1.5 gives G = 1.35.
        let distances = [0.0, 0.1];
        let scores = eligibility(&distances, &[1.0, 1.5]).unwrap();
        let r = gate(&distances, scores.clone(), &cfg()).unwrap();
        assert_eq!(r.gated, vec![0]);
        assert_eq!(r.reference, 1.0);
        assert_eq!(r.g_max, 1.35);

        let r = gate(&distances, scores, &literal()).unwrap();
        assert_eq!(r.gated, vec![1]);
    }

    fn index_of(seqs: &[(usize, f64, usize)]) -> EpisodicMemory {
        // (length, reward, action) per sequence
        let mut mem = EpisodicMemory::new(8, Retention::Fixed).unwrap();
        let mut bias = mem.fresh_bias();
        for (tag, &(len, reward, action)) in seqs.iter().enumerate() {
            let couplets = (0..len).map(|p| Couplet { state: vec![tag as f64 / 8.0, p as f64 / 16.0], action }).collect();
            mem.store(&mut bias, couplets, reward).unwrap();
        }
        mem
    }

    fn report(scores: Vec<f64>, gated: Vec<usize>) -> EligibilityReport {
        EligibilityReport { scores, gated, g_max: 1.0, reference: 1.0 }
    }

    #[test]
    fn single_terminal_couplet_gives_unit_value() {
        let mem = index_of(&[(3, 2.0, 1)]);
        let q = q_estimates(&report(vec![0.0, 0.0, 1.0], vec![2]), mem.index(), &cfg()).unwrap();
        assert_eq!(q, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn mid_sequence_couplet_is_discounted() {
        let mem = index_of(&[(10, 2.0, 2)]);
        let mut scores = vec![0.0; 10];
        scores[4] = 1.0;
        let q = q_estimates(&report(scores, vec![4]), mem.index(), &cfg()).unwrap();
        // exp(-0.5 / 0.9)
        assert!((q[2] - 0.573_753_420_737_432_7).abs() < 1e-12, "{}", q[2]);
    }

    #[test]
    fn rewards_are_relative_to_the_best_gated() {
        let mem = index_of(&[(1, 3.0, 0), (1, 1.5, 0)]);
        let q = q_estimates(&report(vec![1.0, 0.8], vec![0, 1]), mem.index(), &cfg()).unwrap();
        assert!((q[0] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn nothing_gated_means_zero_values() {
        let mem = index_of(&[(2, 1.0, 0)]);
        assert_eq!(q_estimates(&report(vec![0.2, 0.3], vec![]), mem.index(), &cfg()).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn misaligned_report_is_rejected() {
        let mem = index_of(&[(2, 1.0, 0)]);
        assert!(q_estimates(&report(vec![1.0], vec![0]), mem.index(), &cfg()).is_err());
        assert!(q_estimates(&report(vec![1.0, 1.0], vec![5]), mem.index(), &cfg()).is_err());
    }

    #[test]
    fn parse_gate_mode() {
        assert_eq!("similarity".parse::<AbsoluteGate>().unwrap(), AbsoluteGate::Similarity);
        assert_eq!("Eligibility".parse::<AbsoluteGate>().unwrap(), AbsoluteGate::Eligibility);
        assert!("both".parse::<AbsoluteGate>().is_err());
    }
}
