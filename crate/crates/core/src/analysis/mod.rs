//! Exact analysis: coupled-chain evolution, recurrence probabilities and the
//! assumption / conclusion checker.

mod doob;
mod evolve;
mod recurrence;

pub use doob::{
    verify_countable, verify_doob, Classification, CountableVerdict, DoobVerdict, IpmVerdict,
    StartConvergence, VerifyOptions, CONVERGENCE_THRESHOLD, DEFAULT_HORIZON,
};
pub use evolve::{attempt_bound, evolve_coupled, CoupledStart, CouplingAnalysis};
pub use recurrence::{recurrence_psi, RecurrenceReport};
