//! Memory-based episodic control on a discrete double T-maze.
//!
//! * [`memory`]: short-term buffer, bounded episodic store, sequential bias.
//! * [`sec`]: the sequence-biased controller (and its bias-free ablation).
//! * [`mfec`]: tabular max-return baseline with kNN estimates.
//! * [`maze`]: ASCII maze maps, the environment and observation encoders.

pub mod agent;
pub mod error;
pub mod maze;
pub mod memory;
pub mod mfec;
pub mod sec;

pub use agent::{Agent, Decision};
pub use error::{Error, Result};
