//! Support-based checks of the equivalence and non-singularity assumptions.
//!
//! On a finite space `P_n(x,·) ~ P_n(y,·)` iff the two supports coincide, and
//! the laws are non-singular iff the supports meet. Supports are propagated
//! as boolean reachability sets, so verdicts never depend on a float cut-off.

use crate::scalar::Scalar;

use super::finite::FiniteChain;

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn empty(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b)
        })
    }
}

/// Supports of `P_n(x,·)` for every state `x` and `n = 1..=n_max`.
#[derive(Debug, Clone)]
pub struct SupportTable {
    n_max: usize,
    // supports[x][n - 1]
    supports: Vec<Vec<BitSet>>,
}

impl SupportTable {
    pub fn new<S: Scalar>(chain: &FiniteChain<S>, n_max: usize) -> Self {
        Self::for_starts(chain, 0..chain.len(), n_max)
    }

    // Row `k` of the table belongs to the `k`-th start.
    fn for_starts<S: Scalar>(
        chain: &FiniteChain<S>,
        starts: impl IntoIterator<Item = usize>,
        n_max: usize,
    ) -> Self {
        let len = chain.len();
        let row_sets: Vec<BitSet> = (0..len)
            .map(|x| {
                let mut s = BitSet::empty(len);
                for (y, _) in chain.row(x) {
                    s.insert(*y);
                }
                s
            })
            .collect();
        let supports = starts
            .into_iter()
            .map(|x| {
                let mut out = Vec::with_capacity(n_max);
                let mut current = row_sets[x].clone();
                for n in 1..=n_max {
                    if n > 1 {
                        let mut next = BitSet::empty(len);
                        for z in current.ones() {
                            next.union_with(&row_sets[z]);
                        }
                        current = next;
                    }
                    out.push(current.clone());
                }
                out
            })
            .collect();
        Self { n_max, supports }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Smallest `n ≤ n_max` with equal supports.
    pub fn equivalence(&self, x: usize, y: usize) -> Option<usize> {
        if x == y && self.n_max >= 1 {
            return Some(1);
        }
        (0..self.n_max)
            .find(|&k| self.supports[x][k] == self.supports[y][k])
            .map(|k| k + 1)
    }

    /// Smallest `n ≤ n_max` with intersecting supports.
    pub fn nonsingular(&self, x: usize, y: usize) -> Option<usize> {
        if x == y && self.n_max >= 1 {
            return Some(1);
        }
        (0..self.n_max)
            .find(|&k| self.supports[x][k].intersects(&self.supports[y][k]))
            .map(|k| k + 1)
    }

    pub fn support(&self, x: usize, n: usize) -> Vec<usize> {
        self.supports[x][n - 1].ones().collect()
    }
}

/// Smallest `n ≤ n_max` with `P_n(x,·) ~ P_n(y,·)`, if any.
pub fn check_equivalence<S: Scalar>(
    chain: &FiniteChain<S>,
    x: usize,
    y: usize,
    n_max: usize,
) -> Option<usize> {
    pair_table(chain, x, y, n_max).and_then(|(t, a, b)| t.equivalence(a, b))
}

/// Smallest `n ≤ n_max` with `P_n(x,·)` and `P_n(y,·)` not mutually singular.
pub fn check_nonsingular<S: Scalar>(
    chain: &FiniteChain<S>,
    x: usize,
    y: usize,
    n_max: usize,
) -> Option<usize> {
    pair_table(chain, x, y, n_max).and_then(|(t, a, b)| t.nonsingular(a, b))
}

fn pair_table<S: Scalar>(
    chain: &FiniteChain<S>,
    x: usize,
    y: usize,
    n_max: usize,
) -> Option<(SupportTable, usize, usize)> {
    if x >= chain.len() || y >= chain.len() || n_max == 0 {
        return None;
    }
    if x == y {
        return Some((SupportTable::for_starts(chain, [x], n_max), 0, 0));
    }
    Some((SupportTable::for_starts(chain, [x, y], n_max), 0, 1))
}
