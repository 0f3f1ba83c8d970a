//! Experiment harness for the `seqec` agents on the double T-maze: multi-run
//! simulation with derived seeds, CSV metrics, summary statistics, SEC/NSEC
//! ratio tables and SVG charts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod plot;
pub mod ratio;
pub mod runner;
pub mod stats;

pub use config::{AgentKind, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use metrics::{policy_entropy, MetricsRow};
pub use runner::{run_episode, run_experiment, run_seed, simulate};
