use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::chain::FiniteChain;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::doeblin::DoeblinSet;
use super::joint::JointDist;
use super::split::maximal_coupling_row;

/// Largest product space evolved exactly.
pub const EXACT_PAIR_CAP: usize = 10_000;

/// How the rows of a [`CouplingKernel`] are built.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind<S> {
    /// Maximal coupling on every pair.
    Maximal,
    /// Product of the two rows on every pair.
    Independent,
    /// Maximal on `C`, independent elsewhere.
    Hybrid(DoeblinSet<S>),
}

impl<S> KernelKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Maximal => "maximal",
            Self::Independent => "independent",
            Self::Hybrid(_) => "hybrid",
        }
    }
}

type RowCache<S> = RwLock<HashMap<(usize, usize), Arc<JointDist<S>>>>;

/// Markov kernel on `E × E` whose rows are couplings of the rows of a
/// chain.
///
/// Rows are built lazily and cached. Readers share the cache; two threads
/// racing on the same missing row both build it and the first insert wins,
/// which is harmless since construction is deterministic.
#[derive(Debug)]
pub struct CouplingKernel<S> {
    chain: FiniteChain<S>,
    step_len: usize,
    kind: KernelKind<S>,
    cache: RowCache<S>,
}

impl<S: Scalar> Clone for CouplingKernel<S> {
    fn clone(&self) -> Self {
        Self::with_kind(self.chain.clone(), self.step_len, self.kind.clone())
    }
}

impl<S: Scalar> CouplingKernel<S> {
    fn with_kind(chain: FiniteChain<S>, step_len: usize, kind: KernelKind<S>) -> Self {
        Self { chain, step_len, kind, cache: RwLock::new(HashMap::new()) }
    }

    /// Kernel `Q`: maximal coupling of `P(x1,·)` and `P(x2,·)` on every pair.
    pub fn maximal(chain: &FiniteChain<S>) -> Self {
        Self::with_kind(chain.clone(), 1, KernelKind::Maximal)
    }

    /// Kernel `R`: independent components.
    pub fn independent(chain: &FiniteChain<S>) -> Self {
        Self::with_kind(chain.clone(), 1, KernelKind::Independent)
    }

    /// Kernel `S`: `Q` on the Doeblin set, `R` off it, both over the
    /// `N`-step chain when `C` was built for `N > 1`.
    pub fn hybrid(chain: &FiniteChain<S>, set: DoeblinSet<S>) -> Result<Self> {
        if set.state_count() != chain.len() {
            return Err(Error::SizeMismatch { left: chain.len(), right: set.state_count() });
        }
        let step_len = set.step_len();
        Ok(Self::with_kind(chain.power(step_len)?, step_len, KernelKind::Hybrid(set)))
    }

    /// Chain whose steps the kernel couples (`P^N`).
    pub fn step_chain(&self) -> &FiniteChain<S> {
        &self.chain
    }

    /// Base-chain steps per kernel step.
    pub fn step_len(&self) -> usize {
        self.step_len
    }

    pub fn kind(&self) -> &KernelKind<S> {
        &self.kind
    }

    pub fn state_count(&self) -> usize {
        self.chain.len()
    }

    pub fn pair_count(&self) -> usize {
        self.chain.len() * self.chain.len()
    }

    pub fn check_exact_size(&self) -> Result<()> {
        let pairs = self.pair_count();
        if pairs > EXACT_PAIR_CAP {
            return Err(Error::ExactCapExceeded { pairs, cap: EXACT_PAIR_CAP });
        }
        Ok(())
    }

    /// Whether the row at `(x1, x2)` is a maximal coupling.
    pub fn couples_at(&self, x1: usize, x2: usize) -> bool {
        match &self.kind {
            KernelKind::Maximal => true,
            KernelKind::Independent => false,
            KernelKind::Hybrid(set) => set.contains(x1, x2),
        }
    }

    /// The set `C` of a hybrid kernel.
    pub fn doeblin_set(&self) -> Option<&DoeblinSet<S>> {
        match &self.kind {
            KernelKind::Hybrid(set) => Some(set),
            _ => None,
        }
    }

    /// Row at `(x1, x2)`.
    pub fn row(&self, x1: usize, x2: usize) -> Result<Arc<JointDist<S>>> {
        if let Some(row) = self.cache.read().expect("kernel cache poisoned").get(&(x1, x2)) {
            return Ok(Arc::clone(row));
        }
        let built = Arc::new(self.build_row(x1, x2)?);
        let mut cache = self.cache.write().expect("kernel cache poisoned");
        Ok(Arc::clone(cache.entry((x1, x2)).or_insert(built)))
    }

    fn build_row(&self, x1: usize, x2: usize) -> Result<JointDist<S>> {
        self.chain.check_state(x1)?;
        self.chain.check_state(x2)?;
        if self.couples_at(x1, x2) {
            maximal_coupling_row(&self.chain, x1, x2)
        } else {
            Ok(JointDist::product(&self.chain.row_dist(x1), &self.chain.row_dist(x2)))
        }
    }

    /// Number of rows materialised so far.
    pub fn cached_rows(&self) -> usize {
        self.cache.read().expect("kernel cache poisoned").len()
    }
}

/// Kernel `R` of the chain.
pub fn independent_kernel<S: Scalar>(chain: &FiniteChain<S>) -> CouplingKernel<S> {
    CouplingKernel::independent(chain)
}

/// Kernel `S` of the chain over `C`.
pub fn hybrid_kernel<S: Scalar>(chain: &FiniteChain<S>, set: DoeblinSet<S>) -> Result<CouplingKernel<S>> {
    CouplingKernel::hybrid(chain, set)
}
