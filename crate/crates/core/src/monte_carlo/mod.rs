//! Seeded simulation of single and coupled paths.
//!
//! Replica `r` of a run with seed `s` draws from a ChaCha8 stream seeded with
//! `s ^ r`, and results are collected in replica order, so output does not
//! depend on the number of worker threads.

mod attempts;
mod coupled;
mod estimate;
mod paths;
mod sampler;

pub use attempts::{attempt_statistics, AttemptStats};
pub use coupled::{
    estimate_coupling_tail, sample_coupled, sample_coupled_replica, CoupledPath, CoupledSampler,
    HybridRule, TailEstimate,
};
pub use estimate::McEstimate;
pub use paths::{escape_bias_bound, estimate_hit_probability, sample_path, PathSample};
pub use sampler::{draw_from, replica_rng, Transitions};
