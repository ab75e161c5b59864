//! Simulation of coupled pairs.

use rand::Rng;
use rayon::prelude::*;

use crate::coupling::CouplingKernel;
use crate::scalar::Scalar;

use super::estimate::McEstimate;
use super::sampler::{replica_rng, Transitions};

/// A Markov kernel on pairs that can be sampled.
pub trait CoupledSampler: Sync {
    type State: Copy + Eq + Send + Sync + std::fmt::Debug;

    fn next_pair<R: Rng + ?Sized>(
        &self,
        z: (Self::State, Self::State),
        rng: &mut R,
    ) -> (Self::State, Self::State);
}

impl<S: Scalar> CoupledSampler for CouplingKernel<S> {
    type State = usize;

    fn next_pair<R: Rng + ?Sized>(&self, z: (usize, usize), rng: &mut R) -> (usize, usize) {
        let row = self.row(z.0, z.1).expect("pair states come from the kernel's chain");
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (pair, p) in row.entries() {
            acc += p.as_f64();
            if u < acc {
                return *pair;
            }
        }
        row.entries().last().expect("rows are never empty").0
    }
}

/// Coupling built on the fly from sparse rows: maximal coupling where
/// `in_set(x1, x2)` holds, independent moves elsewhere. Works for chains
/// whose product space is too large (or infinite) to materialise.
pub struct HybridRule<'a, C: Transitions> {
    chain: &'a C,
    in_set: Box<dyn Fn(C::State, C::State) -> bool + Send + Sync + 'a>,
}

impl<'a, C: Transitions> HybridRule<'a, C> {
    pub fn new(chain: &'a C, in_set: impl Fn(C::State, C::State) -> bool + Send + Sync + 'a) -> Self {
        Self { chain, in_set: Box::new(in_set) }
    }

    /// Maximal coupling on every pair.
    pub fn maximal(chain: &'a C) -> Self {
        Self::new(chain, |_, _| true)
    }
}

impl<C: Transitions> CoupledSampler for HybridRule<'_, C> {
    type State = C::State;

    fn next_pair<R: Rng + ?Sized>(&self, z: (C::State, C::State), rng: &mut R) -> (C::State, C::State) {
        let (a, b) = z;
        if !(self.in_set)(a, b) {
            return (self.chain.sample_next(a, rng), self.chain.sample_next(b, rng));
        }
        if a == b {
            let y = self.chain.sample_next(a, rng);
            return (y, y);
        }
        let mut merged: Vec<(C::State, f64, f64)> = self
            .chain
            .row_f64(a)
            .into_iter()
            .map(|(y, p)| (y, p, 0.0))
            .chain(self.chain.row_f64(b).into_iter().map(|(y, q)| (y, 0.0, q)))
            .collect();
        merged.sort_by_key(|t| t.0);
        merged.dedup_by(|next, kept| {
            let same = next.0 == kept.0;
            if same {
                kept.1 += next.1;
                kept.2 += next.2;
            }
            same
        });
        let overlap: f64 = merged.iter().map(|&(_, p, q)| p.min(q)).sum();
        let m1: f64 = merged.iter().map(|&(_, p, q)| p - p.min(q)).sum();
        let m2: f64 = merged.iter().map(|&(_, p, q)| q - p.min(q)).sum();
        let u: f64 = rng.random();
        // Rounding can leave `overlap` just below 1 with empty residuals.
        if u < overlap || !(m1 > 0.0 && m2 > 0.0) {
            let y = pick(&merged, overlap, rng, |p, q| p.min(q));
            return (y, y);
        }
        (pick(&merged, m1, rng, |p, q| p - p.min(q)), pick(&merged, m2, rng, |p, q| q - p.min(q)))
    }
}

/// Inverse-CDF draw with weights `w(p, q)` of total `mass`.
fn pick<T: Copy, R: Rng + ?Sized>(merged: &[(T, f64, f64)], mass: f64, rng: &mut R, w: fn(f64, f64) -> f64) -> T {
    let u = rng.random::<f64>() * mass;
    let mut acc = 0.0;
    let mut last = merged[0].0;
    for &(y, p, q) in merged {
        let wy = w(p, q);
        if wy > 0.0 {
            acc += wy;
            last = y;
            if u < acc {
                return y;
            }
        }
    }
    last
}

/// Trajectory of `Z` and its first diagonal time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledPath<T> {
    pub trajectory: Vec<(T, T)>,
    /// `T = inf{n : Z¹_n = Z²_n}` if reached within the run.
    pub coupling_time: Option<usize>,
    pub seed: u64,
    pub length: usize,
}

/// Simulates `n` steps of the coupled chain from `z0` on stream `replica`.
pub fn sample_coupled_replica<K: CoupledSampler>(
    kernel: &K,
    z0: (K::State, K::State),
    n: usize,
    seed: u64,
    replica: u64,
) -> CoupledPath<K::State> {
    let mut rng = replica_rng(seed, replica);
    let mut trajectory = Vec::with_capacity(n + 1);
    let mut z = z0;
    let mut coupling_time = (z.0 == z.1).then_some(0);
    trajectory.push(z);
    for step in 1..=n {
        z = kernel.next_pair(z, &mut rng);
        if coupling_time.is_none() && z.0 == z.1 {
            coupling_time = Some(step);
        }
        trajectory.push(z);
    }
    CoupledPath { trajectory, coupling_time, seed, length: n }
}

/// [`sample_coupled_replica`] on stream 0.
pub fn sample_coupled<K: CoupledSampler>(
    kernel: &K,
    z0: (K::State, K::State),
    n: usize,
    seed: u64,
) -> CoupledPath<K::State> {
    sample_coupled_replica(kernel, z0, n, seed, 0)
}

/// Estimates of `P(T > n)` and `P(Z¹_n ≠ Z²_n)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub first_meeting: Vec<McEstimate>,
    pub uncoupled: Vec<McEstimate>,
}

/// Runs every replica without storing paths; per-step counts are summed,
/// which keeps the result independent of how replicas are scheduled.
pub fn estimate_coupling_tail<K: CoupledSampler>(
    kernel: &K,
    z0: (K::State, K::State),
    n_max: usize,
    replicas: usize,
    seed: u64,
) -> TailEstimate {
    let len = n_max + 1;
    let counts = (0..replicas as u64)
        .into_par_iter()
        .fold(
            || vec![0usize; 2 * len],
            |mut acc, r| {
                let mut rng = replica_rng(seed, r);
                let mut z = z0;
                let mut met = z.0 == z.1;
                for n in 0..len {
                    if n > 0 {
                        z = kernel.next_pair(z, &mut rng);
                        met |= z.0 == z.1;
                    }
                    acc[n] += usize::from(!met);
                    acc[len + n] += usize::from(z.0 != z.1);
                }
                acc
            },
        )
        .reduce(
            || vec![0usize; 2 * len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let est = |c: &[usize]| c.iter().map(|&k| McEstimate::from_counts(k, replicas)).collect();
    TailEstimate { first_meeting: est(&counts[..len]), uncoupled: est(&counts[len..]) }
}
