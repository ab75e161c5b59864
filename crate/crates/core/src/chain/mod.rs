//! Finite and countable Markov chains, their laws and invariant measures.

mod countable;
mod dist;
mod finite;
mod invariant;
mod structure;
mod support;

pub use countable::{
    tv_against_truncated, BirthDeath, CountableChain, SparseDist, TransitionRule,
    TruncatedInvariant,
};
pub use dist::{total_variation, Dist};
pub use finite::FiniteChain;
pub use invariant::invariant_measures;
pub use structure::{structure, ChainStructure, CommClass};
pub use support::{check_equivalence, check_nonsingular, SupportTable};
