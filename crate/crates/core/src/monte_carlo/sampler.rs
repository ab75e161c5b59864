use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{CountableChain, FiniteChain};
use crate::scalar::Scalar;

/// Generator for replica `replica` of a run seeded with `seed`.
///
/// Each replica owns the stream `seed ^ replica`, so any partition of the
/// replicas across threads reproduces the same draws.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ replica)
}

/// Inverse-CDF draw from a sparse row, scanning entries in their stored
/// order. Rounding slack falls on the last entry.
pub fn draw_from<T: Copy, R: Rng + ?Sized>(row: &[(T, f64)], rng: &mut R) -> T {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (target, p) in row {
        acc += p;
        if u < acc {
            return *target;
        }
    }
    row.last().expect("rows are never empty").0
}

/// A chain that can be simulated one step at a time.
pub trait Transitions: Sync {
    type State: Copy + Ord + Eq + Hash + Debug + Send + Sync;

    /// Positive entries of the row at `s`, in a fixed order.
    fn row_f64(&self, s: Self::State) -> Vec<(Self::State, f64)>;

    fn sample_next<R: Rng + ?Sized>(&self, s: Self::State, rng: &mut R) -> Self::State {
        draw_from(&self.row_f64(s), rng)
    }
}

impl<S: Scalar> Transitions for FiniteChain<S> {
    type State = usize;

    fn row_f64(&self, s: usize) -> Vec<(usize, f64)> {
        self.row(s).iter().map(|(y, p)| (*y, p.as_f64())).collect()
    }

    fn sample_next<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let row = self.row(s);
        let mut acc = 0.0;
        for (target, p) in row {
            acc += p.as_f64();
            if u < acc {
                return *target;
            }
        }
        row.last().expect("rows are never empty").0
    }
}

impl<S: Scalar> Transitions for CountableChain<S> {
    type State = u64;

    fn row_f64(&self, s: u64) -> Vec<(u64, f64)> {
        self.row(s).into_iter().map(|(y, p)| (y, p.as_f64())).collect()
    }

    fn sample_next<R: Rng + ?Sized>(&self, s: u64, rng: &mut R) -> u64 {
        match self {
            // Same order as `row`: down, hold, up.
            CountableChain::BirthDeath(bd) => {
                let u: f64 = rng.random();
                if s == 0 {
                    let hold = bd.zero_hold.as_f64();
                    if u < hold || bd.zero_up.is_zero() {
                        0
                    } else {
                        1
                    }
                } else {
                    let down = bd.down.as_f64();
                    let hold = bd.hold.as_f64();
                    if u < down {
                        s - 1
                    } else if u < down + hold || bd.up.is_zero() {
                        s
                    } else {
                        s + 1
                    }
                }
            }
            CountableChain::Rule(_) => draw_from(&self.row_f64(s), rng),
        }
    }
}
