//! Sequence-biased episodic controller.
//!
//! Each step scores every stored couplet against the current state, weights
//! the similarity by the couplet's sequential bias, keeps only the couplets
//! that clear both an absolute and a proportional threshold, and turns the
//! survivors into per-action values discounted by their distance to the end
//! of their sequence. The action is sampled from the normalized values.
//!
//! With `sequential_bias` off the bias stays at one forever, which gives the
//! non-sequential ablation.
//!
//! By default the absolute threshold tests raw similarity and the bias only
//! competes in the proportional test ([`AbsoluteGate::Similarity`]). Testing
//! the biased score instead ([`AbsoluteGate::Eligibility`]) lets a couplet
//! whose bias keeps growing match ever more distant states.

mod agent;
mod config;
mod policy;
mod retrieval;

pub use agent::SecAgent;
pub use config::SecConfig;
pub use policy::{action_distribution, select_action, ActionDistribution};
pub use retrieval::{distance, eligibility, gate, q_estimates, AbsoluteGate, EligibilityReport};
