use std::path::Path;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqec::maze::{EnvConfig, MazeEnv, MazeMap};
use seqec::sec::ActionDistribution;
use seqec::{Agent, Decision};
use seqec_harness::experiments::{compare, sweep_memory};
use seqec_harness::metrics::{read_metrics, CSV_HEADER};
use seqec_harness::plot::emit_plots;
use seqec_harness::stats::Metric;
use seqec_harness::{run_episode, run_experiment, simulate, AgentKind, ExperimentConfig};

fn small(out: &Path) -> ExperimentConfig {
    ExperimentConfig { episodes: 25, runs: 3, ec_capacity: 20, output: out.to_path_buf(), ..ExperimentConfig::default() }
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn compare_is_byte_identical_across_executions_and_scheduling() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    compare(&small(a.path())).unwrap();
    compare(&small(b.path())).unwrap();
    compare(&ExperimentConfig { parallel: false, ..small(c.path()) }).unwrap();
    for agent in AgentKind::ALL {
        let name = format!("compare_{agent}.csv");
        let first = read(&a.path().join(&name));
        assert_eq!(first, read(&b.path().join(&name)), "{name}");
        assert_eq!(first, read(&c.path().join(&name)), "{name}");
    }
}

#[test]
fn runs_do_not_depend_on_each_other() {
    for agent in AgentKind::ALL {
        let cfg = ExperimentConfig { agent, episodes: 15, runs: 2, ec_capacity: 10, parallel: false, ..ExperimentConfig::default() };
        let two = simulate(&cfg).unwrap();
        let four = simulate(&ExperimentConfig { runs: 4, ..cfg.clone() }).unwrap();
        assert_eq!(two[..], four[..2], "{agent}");
        // another master seed moves every run
        let other = simulate(&ExperimentConfig { master_seed: cfg.master_seed + 1, ..cfg }).unwrap();
        assert_ne!(two[0].seed, other[0].seed);
        assert_ne!(two[1].seed, other[1].seed);
    }
}

#[test]
fn csv_has_the_documented_schema_and_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { runs: 2, episodes: 7, ..small(dir.path()) };
    let out = run_experiment(&cfg, "schema").unwrap();
    let text = std::fs::read_to_string(&out.csv).unwrap();
    assert!(!text.contains('\r'));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, CSV_HEADER.join(","));
    assert_eq!(header, "run_id,episode,reward,steps,mean_entropy,ec_sequence_count,memory_filled");
    let table = read_metrics(&out.csv).unwrap();
    assert_eq!(table.rows.len(), 14);
    assert_eq!((table.runs(), table.episodes()), (2, 7));
    assert!(table.meta("seed_rule").is_some());
    assert!(table.meta("run_seed.1").is_some());
    for r in &table.rows {
        assert!(r.reward >= 0.0 && r.steps <= 1000);
        assert!((0.0..=4f64.ln() + 1e-12).contains(&r.mean_entropy));
    }
}

#[test]
fn plotting_bad_input_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let renamed = dir.path().join("renamed.csv");
    std::fs::write(&renamed, "run_id,episode,reward,steps,entropy,ec_sequence_count,memory_filled\n0,0,1,1,0,0,false\n").unwrap();
    let good_dir = tempfile::tempdir().unwrap();
    let good = run_experiment(&small(good_dir.path()), "good").unwrap().csv;

    let out = dir.path().join("plots");
    assert!(emit_plots(&[good.clone(), empty], &out, 5, &[Metric::Reward]).is_err());
    let err = emit_plots(&[good, renamed], &out, 5, &[Metric::Reward]).unwrap_err();
    assert!(err.to_string().contains("mean_entropy"), "{err}");
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn compare_plots_hold_three_labelled_series() {
    let dir = tempfile::tempdir().unwrap();
    let report = compare(&small(dir.path())).unwrap();
    let svgs: Vec<_> = report.files.iter().filter(|f| f.extension().is_some_and(|e| e == "svg")).collect();
    assert_eq!(svgs.len(), 2);
    for svg in svgs {
        let text = std::fs::read_to_string(svg).unwrap();
        assert!(text.starts_with("<?xml") || text.starts_with("<svg"));
        for label in ["compare_sec", "compare_nsec", "compare_mfec"] {
            assert!(text.contains(label), "{label} missing from {}", svg.display());
        }
    }
}

#[test]
fn sweep_writes_one_csv_per_agent_and_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { episodes: 10, runs: 2, ..small(dir.path()) };
    let report = sweep_memory(&cfg, &[125, 250, 500, 1000]).unwrap();
    let csvs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("sweep_") && n.ends_with(".csv"))
        .collect();
    assert_eq!(csvs.len(), 8, "{csvs:?}");
    assert_eq!(report.ratio.cells.len(), 4);
    assert!(report.ratio.cells.iter().all(|row| row.len() == 4));
    assert!(dir.path().join("sweep_entropy.svg").exists());
    assert!(dir.path().join("ratio_table.svg").exists());
}

#[test]
fn empty_capacity_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sweep_memory(&small(dir.path()), &[]).is_err());
}

/// Pushes against the north wall of the top-left corner forever.
struct Stubborn;

impl Agent for Stubborn {
    fn act(&mut self, _: &[f64], _: &mut dyn RngCore) -> seqec::Result<Decision> {
        Ok(Decision { action: 0, policy: ActionDistribution::uniform(4), fallback: true })
    }

    fn observe_outcome(&mut self, _: f64, _: bool) -> seqec::Result<()> {
        Ok(())
    }

    fn memory_size(&self) -> usize {
        0
    }

    fn memory_full(&self) -> bool {
        false
    }
}

#[test]
fn timeout_episode_scores_zero_after_the_cap() {
    let map = Arc::new(MazeMap::parse("S.\n#G\n").unwrap());
    let mut env = MazeEnv::new(map, EnvConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = run_episode(&mut Stubborn, &mut env, &mut rng).unwrap();
    assert_eq!((r.reward, r.steps), (0.0, 1000));
    assert_eq!(r.mean_entropy, 4f64.ln());
}
