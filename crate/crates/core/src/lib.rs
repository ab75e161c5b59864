//! Coupling constructions for discrete Markov chains and exact or
//! Monte Carlo checks of total-variation convergence to the invariant law.
//!
//! The numerical core is generic over [`Scalar`], implemented for `f64`,
//! `f32` and [`BigRational`]. The aliases below fix the two instantiations
//! used in practice: floating point for analysis at scale and exact
//! rationals for closed-form checks.

pub mod analysis;
pub mod chain;
pub mod chainfile;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod gallery;
pub mod linalg;
pub mod monte_carlo;
pub mod scalar;

pub use num_rational::BigRational;

pub use chain::{
    check_equivalence, check_nonsingular, invariant_measures, structure, total_variation,
    BirthDeath, ChainStructure, CountableChain, Dist, FiniteChain,
};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Floating-point finite chain.
pub type Chain = FiniteChain<f64>;
/// Exact rational finite chain.
pub type ExactChain = FiniteChain<BigRational>;
/// Floating-point probability vector.
pub type Law = Dist<f64>;
/// Exact probability vector.
pub type ExactLaw = Dist<BigRational>;
/// Floating-point countable chain.
pub type Walk = CountableChain<f64>;
