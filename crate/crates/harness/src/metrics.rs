//! Per-episode metrics and their CSV form.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use seqec::sec::ActionDistribution;

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: [&str; 7] = ["run_id", "episode", "reward", "steps", "mean_entropy", "ec_sequence_count", "memory_filled"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub run_id: usize,
    pub episode: usize,
    pub reward: f64,
    pub steps: usize,
    /// Mean per-step policy entropy in nats.
    pub mean_entropy: f64,
    /// Sequences held by the episodic memory (table entries for MFEC).
    pub ec_sequence_count: usize,
    pub memory_filled: bool,
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn policy_entropy(dist: &ActionDistribution) -> f64 {
    let h: f64 = dist.probs().iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    h.max(0.0)
}

/// A metrics CSV together with its `#` metadata lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsTable {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn runs(&self) -> usize {
        self.rows.iter().map(|r| r.run_id + 1).max().unwrap_or(0)
    }

    pub fn episodes(&self) -> usize {
        self.rows.iter().map(|r| r.episode + 1).max().unwrap_or(0)
    }
}

/// Writes metadata as `# key=value` lines followed by the header and rows.
pub fn write_metrics<W: Write>(w: W, meta: &[(String, String)], rows: &[MetricsRow]) -> std::io::Result<()> {
    let mut w = BufWriter::new(w);
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.run_id.to_string(),
            r.episode.to_string(),
            r.reward.to_string(),
            r.steps.to_string(),
            r.mean_entropy.to_string(),
            r.ec_sequence_count.to_string(),
            r.memory_filled.to_string(),
        ])?;
    }
    out.flush()
}

pub fn write_metrics_file(path: &Path, meta: &[(String, String)], rows: &[MetricsRow]) -> Result<()> {
    let file = File::create(path).map_err(HarnessError::io(path))?;
    write_metrics(file, meta, rows).map_err(HarnessError::io(path))
}

fn field<T: std::str::FromStr>(path: &Path, record: &csv::StringRecord, col: usize) -> Result<T> {
    let raw = record.get(col).unwrap_or("");
    raw.parse().map_err(|_| HarnessError::Schema {
        path: path.into(),
        column: CSV_HEADER[col].into(),
        detail: format!("cannot parse '{raw}' on line {}", record.position().map_or(0, |p| p.line())),
    })
}

/// Reads a metrics CSV, checking the header column by column.
pub fn read_metrics(path: &Path) -> Result<MetricsTable> {
    let file = File::open(path).map_err(HarnessError::io(path))?;
    let mut meta = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(HarnessError::io(path))?;
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.trim_start().split_once('=') {
            meta.push((k.to_string(), v.to_string()));
        }
    }

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).flexible(true).from_path(path).map_err(HarnessError::csv(path))?;
    let header = reader.headers().map_err(HarnessError::csv(path))?.clone();
    if header.is_empty() || (header.len() == 1 && header.get(0) == Some("")) {
        return Err(HarnessError::Empty(PathBuf::from(path)));
    }
    for (i, want) in CSV_HEADER.iter().enumerate() {
        match header.get(i) {
            Some(found) if found == *want => {}
            Some(found) => {
                return Err(HarnessError::Schema { path: path.into(), column: found.into(), detail: format!("expected '{want}' at position {}", i + 1) });
            }
            None => return Err(HarnessError::Schema { path: path.into(), column: (*want).into(), detail: "missing".into() }),
        }
    }
    if let Some(extra) = header.get(CSV_HEADER.len()) {
        return Err(HarnessError::Schema { path: path.into(), column: extra.into(), detail: "unexpected extra column".into() });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(HarnessError::csv(path))?;
        let memory_filled = match record.get(6) {
            Some("true") => true,
            Some("false") => false,
            other => {
                return Err(HarnessError::Schema {
                    path: path.into(),
                    column: "memory_filled".into(),
                    detail: format!("expected true or false, got '{}'", other.unwrap_or("")),
                })
            }
        };
        rows.push(MetricsRow {
            run_id: field(path, &record, 0)?,
            episode: field(path, &record, 1)?,
            reward: field(path, &record, 2)?,
            steps: field(path, &record, 3)?,
            mean_entropy: field(path, &record, 4)?,
            ec_sequence_count: field(path, &record, 5)?,
            memory_filled,
        });
    }
    if rows.is_empty() {
        return Err(HarnessError::Empty(PathBuf::from(path)));
    }
    Ok(MetricsTable { meta, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert!((policy_entropy(&ActionDistribution::uniform(4)) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(policy_entropy(&ActionDistribution::from_probs(vec![0.0, 1.0, 0.0, 0.0]).unwrap()), 0.0);
        let half = ActionDistribution::from_probs(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!((policy_entropy(&half) - 2f64.ln()).abs() < 1e-12);
    }

    fn row(run_id: usize, episode: usize) -> MetricsRow {
        MetricsRow { run_id, episode, reward: 2.957, steps: 43, mean_entropy: 0.1, ec_sequence_count: 7, memory_filled: false }
    }

    #[test]
    fn round_trip_with_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let meta = vec![("agent".to_string(), "sec".to_string()), ("tau".into(), "0.9".into())];
        let rows = vec![row(0, 0), row(0, 1), MetricsRow { memory_filled: true, reward: 0.0, ..row(1, 0) }];
        write_metrics_file(&path, &meta, &rows).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.lines().nth(2).unwrap() == CSV_HEADER.join(","));

        let table = read_metrics(&path).unwrap();
        assert_eq!(table.rows, rows);
        assert_eq!(table.meta, meta);
        assert_eq!(table.meta("tau"), Some("0.9"));
        assert_eq!((table.runs(), table.episodes()), (2, 2));
    }

    #[test]
    fn schema_errors_name_the_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "run_id,episode,score,steps,mean_entropy,ec_sequence_count,memory_filled\n0,0,1,1,0,0,false\n").unwrap();
        match read_metrics(&path) {
            Err(HarnessError::Schema { column, .. }) => assert_eq!(column, "score"),
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "run_id,episode,reward,steps,mean_entropy,ec_sequence_count,memory_filled\n0,0,x,1,0,0,false\n").unwrap();
        match read_metrics(&path) {
            Err(HarnessError::Schema { column, .. }) => assert_eq!(column, "reward"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "").unwrap();
        assert!(matches!(read_metrics(&path), Err(HarnessError::Empty(_))));
        std::fs::write(&path, "# agent=sec\nrun_id,episode,reward,steps,mean_entropy,ec_sequence_count,memory_filled\n").unwrap();
        assert!(matches!(read_metrics(&path), Err(HarnessError::Empty(_))));
    }
}
