use rayon::prelude::*;

use super::estimate::McEstimate;
use super::sampler::{replica_rng, Transitions};

/// One simulated trajectory `X_0, ..., X_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSample<T> {
    pub trajectory: Vec<T>,
    pub seed: u64,
    pub length: usize,
}

/// Simulates `n` steps from `x0` on stream 0 of `seed`.
pub fn sample_path<C: Transitions>(chain: &C, x0: C::State, n: usize, seed: u64) -> PathSample<C::State> {
    let mut rng = replica_rng(seed, 0);
    let mut trajectory = Vec::with_capacity(n + 1);
    let mut x = x0;
    trajectory.push(x);
    for _ in 0..n {
        x = chain.sample_next(x, &mut rng);
        trajectory.push(x);
    }
    PathSample { trajectory, seed, length: n }
}

/// Fraction of replicas that visit `target` at some time in `0..=horizon`.
///
/// The estimate is censored at the horizon, so it never exceeds the true
/// hitting probability in expectation; see [`escape_bias_bound`].
pub fn estimate_hit_probability<C: Transitions>(
    chain: &C,
    x0: C::State,
    target: C::State,
    horizon: usize,
    replicas: usize,
    seed: u64,
) -> McEstimate {
    let hits: Vec<bool> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut x = x0;
            if x == target {
                return true;
            }
            for _ in 0..horizon {
                x = chain.sample_next(x, &mut rng);
                if x == target {
                    return true;
                }
            }
            false
        })
        .collect();
    McEstimate::from_counts(hits.iter().filter(|h| **h).count(), replicas)
}

/// Upper bound on `P(hit 0 after the horizon)` for a birth-death walk with
/// up-probability `up > down` started at `x0`.
///
/// A path still alive at time `H` either sits below `m = H d / 2`
/// (`d = up − down`), which by Hoeffding on the `±1/0` increments has
/// probability at most `exp(−H d² / 8)`, or must come down from above `m`,
/// which the gambler's-ruin formula bounds by `(down/up)^m`. Returns 1 when
/// `up ≤ down`.
pub fn escape_bias_bound(up: f64, down: f64, x0: u64, horizon: usize) -> f64 {
    if up <= down {
        return 1.0;
    }
    let drift = up - down;
    let h = horizon as f64;
    let m = h * drift / 2.0;
    let deviation = (h * drift - m + x0 as f64).max(0.0);
    let below = (-deviation * deviation / (2.0 * h)).exp();
    let climb_back = (down / up).powf(m.floor());
    (below + climb_back).min(1.0)
}
