//! SEC over NSEC performance ratios across memory capacities.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::metrics::MetricsRow;
use crate::stats::{final_mean, Metric};

/// Rows of one agent at one episodic memory capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub capacity: usize,
    pub rows: Vec<MetricsRow>,
}

/// `cells[i][j]` = SEC@`sec_capacities[i]` over NSEC@`nsec_capacities[j]`;
/// `None` where the NSEC mean is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub sec_capacities: Vec<usize>,
    pub nsec_capacities: Vec<usize>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl RatioTable {
    pub fn cell(&self, sec_capacity: usize, nsec_capacity: usize) -> Option<f64> {
        let i = self.sec_capacities.iter().position(|&c| c == sec_capacity)?;
        let j = self.nsec_capacities.iter().position(|&c| c == nsec_capacity)?;
        self.cells[i][j]
    }

    /// CSV with SEC capacities down and NSEC capacities across; `NA` marks
    /// unavailable cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sec_capacity");
        for c in &self.nsec_capacities {
            let _ = write!(out, ",nsec_{c}");
        }
        out.push('\n');
        for (cap, row) in self.sec_capacities.iter().zip(&self.cells) {
            let _ = write!(out, "{cap}");
            for cell in row {
                match cell {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(HarnessError::io(path))
    }
}

/// Ratio of final-window mean rewards for every SEC and NSEC capacity pair.
pub fn performance_matrix(sec: &[CapacityResult], nsec: &[CapacityResult], window: usize) -> RatioTable {
    let means = |set: &[CapacityResult]| -> Vec<f64> { set.iter().map(|c| final_mean(&c.rows, Metric::Reward, window)).collect() };
    let (sec_means, nsec_means) = (means(sec), means(nsec));
    let cells = sec_means
        .iter()
        .map(|&s| nsec_means.iter().map(|&n| (n != 0.0).then(|| s / n)).collect())
        .collect();
    RatioTable {
        sec_capacities: sec.iter().map(|c| c.capacity).collect(),
        nsec_capacities: nsec.iter().map(|c| c.capacity).collect(),
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(capacity: usize, reward: f64) -> CapacityResult {
        let rows = (0..4)
            .map(|e| MetricsRow { run_id: 0, episode: e, reward, steps: 1, mean_entropy: 0.0, ec_sequence_count: 0, memory_filled: false })
            .collect();
        CapacityResult { capacity, rows }
    }

    #[test]
    fn self_ratio_is_one() {
        let set = vec![result(125, 2.0), result(250, 2.5)];
        let t = performance_matrix(&set, &set, 2);
        assert_eq!(t.cell(125, 125), Some(1.0));
        assert_eq!(t.cell(250, 250), Some(1.0));
        assert_eq!(t.cell(125, 250), Some(0.8));
    }

    #[test]
    fn arithmetic_and_unavailable_cells() {
        let t = performance_matrix(&[result(1, 2.5)], &[result(1, 1.25), result(2, 0.0)], 4);
        assert_eq!(t.cells, vec![vec![Some(2.0), None]]);
        assert_eq!(t.to_csv(), "sec_capacity,nsec_1,nsec_2\n1,2,NA\n");
    }

    #[test]
    fn grid_dimensions_follow_the_capacity_lists() {
        let caps = [125, 250, 500, 1000];
        let set: Vec<_> = caps.iter().map(|&c| result(c, 1.0)).collect();
        let t = performance_matrix(&set, &set, 4);
        assert_eq!(t.cells.iter().map(Vec::len).sum::<usize>(), 16);
    }
}
