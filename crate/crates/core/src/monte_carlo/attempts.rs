use rayon::prelude::*;

use crate::analysis::attempt_bound;
use crate::coupling::DoeblinSet;
use crate::scalar::Scalar;

use super::coupled::{sample_coupled_replica, CoupledSampler};
use super::estimate::McEstimate;

/// Coupling attempts of a simulated pair chain `Z` at its visits to `C`.
///
/// With `τ_0 = 0` and `τ_k = inf{n > τ_{k−1} : Z_n ∈ C}`, attempt `k`
/// succeeds when `T ≤ τ_k`. Visits beyond the horizon are absent; a replica
/// whose `τ_k` lies beyond the horizon counts as a success only if `T` was
/// observed.
#[derive(Debug, Clone, PartialEq)]
pub struct AttemptStats {
    /// Per replica, `τ_1, τ_2, ...` up to `attempts` visits within the horizon.
    pub visit_times: Vec<Vec<usize>>,
    pub coupling_times: Vec<Option<usize>>,
    /// Per replica, `T ≤ τ_k` for `k = 1..=attempts`.
    pub success: Vec<Vec<bool>>,
    /// `p̂_k` for `k = 1..=attempts`.
    pub p_hat: Vec<McEstimate>,
    pub p: f64,
    pub start_in_set: bool,
    /// `attempt_bound(p, k')` for each `k`, where `k' = k` when `Z_0 ∈ C`
    /// and `k − 1` otherwise (the visit at time 0 is an attempt only then).
    pub bounds: Vec<f64>,
}

impl AttemptStats {
    /// Whether `p̂_k ≥ bound_k − 3·stderr` for every `k`.
    pub fn bound_holds(&self) -> bool {
        self.p_hat.iter().zip(&self.bounds).all(|(e, b)| e.point >= b - 3.0 * e.stderr)
    }
}

pub fn attempt_statistics<K, S>(
    kernel: &K,
    set: &DoeblinSet<S>,
    z0: (usize, usize),
    attempts: usize,
    replicas: usize,
    horizon: usize,
    seed: u64,
) -> AttemptStats
where
    K: CoupledSampler<State = usize>,
    S: Scalar,
{
    let runs: Vec<(Vec<usize>, Option<usize>)> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let path = sample_coupled_replica(kernel, z0, horizon, seed, r);
            let visits = path
                .trajectory
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, (a, b))| set.contains(*a, *b))
                .map(|(n, _)| n)
                .take(attempts)
                .collect();
            (visits, path.coupling_time)
        })
        .collect();

    let success: Vec<Vec<bool>> = runs
        .iter()
        .map(|(visits, t)| {
            (0..attempts)
                .map(|k| match (t, visits.get(k)) {
                    (Some(t), Some(tau)) => t <= tau,
                    (Some(_), None) => true,
                    (None, _) => false,
                })
                .collect()
        })
        .collect();
    let p_hat = (0..attempts)
        .map(|k| McEstimate::from_counts(success.iter().filter(|s| s[k]).count(), replicas))
        .collect();
    let start_in_set = set.contains(z0.0, z0.1);
    let p = set.p().as_f64();
    let bounds = (1..=attempts)
        .map(|k| attempt_bound(&p, if start_in_set { k } else { k - 1 }))
        .collect();
    let (visit_times, coupling_times) = runs.into_iter().unzip();
    AttemptStats { visit_times, coupling_times, success, p_hat, p, start_in_set, bounds }
}
