//! Acquire PDDL action schemas from an ensemble of language-model samples,
//! filter them by semantic coherence with a conformal threshold, and rank
//! the plans that complete schema sets produce.
//!
//! Pipeline: [`ingest`] builds the candidate library, [`semantic`] scores and
//! filters it, [`ensemble`] sweeps schema sets through the [`planner`] and
//! ranks the plans. [`negatives`] synthesizes encoder training data and
//! [`analysis`] models how the ensemble size drives success.

pub mod analysis;
pub mod cli;
pub mod ensemble;
pub mod ingest;
pub mod negatives;
pub mod pddl;
pub mod pipeline;
pub mod planner;
pub mod semantic;
