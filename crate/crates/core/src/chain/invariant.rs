use crate::error::Result;
use crate::linalg::solve;
use crate::scalar::Scalar;

use super::dist::Dist;
use super::finite::FiniteChain;
use super::structure::structure;

/// Extreme invariant probability measures, one per recurrent class, in class
/// order.
///
/// Each is the unique stationary vector of the chain restricted to its
/// closed class, extended by zero. Every invariant measure of the chain is a
/// convex combination of these.
pub fn invariant_measures<S: Scalar>(chain: &FiniteChain<S>) -> Result<Vec<Dist<S>>> {
    let st = structure(chain);
    st.recurrent_classes()
        .map(|class| {
            let local = restricted_stationary(chain, &class.states)?;
            let mut w = vec![S::zero(); chain.len()];
            for (&x, v) in class.states.iter().zip(local) {
                w[x] = v;
            }
            Ok(Dist::from_weights_unchecked(w))
        })
        .collect()
}

/// Solves `μ (P − I) = 0`, `Σ μ = 1` on a closed class.
fn restricted_stationary<S: Scalar>(chain: &FiniteChain<S>, states: &[usize]) -> Result<Vec<S>> {
    let m = states.len();
    let mut pos = vec![usize::MAX; chain.len()];
    for (k, &x) in states.iter().enumerate() {
        pos[x] = k;
    }
    // a[j][i] = P(i, j) - δ_ij: the transposed system, last equation replaced
    // by the normalisation.
    let mut a = vec![vec![S::zero(); m]; m];
    for (i, &x) in states.iter().enumerate() {
        for (y, p) in chain.row(x) {
            let j = pos[*y];
            a[j][i] = a[j][i].clone() + p.clone();
        }
        a[i][i] = a[i][i].clone() - S::one();
    }
    a[m - 1] = vec![S::one(); m];
    let mut b = vec![S::zero(); m];
    b[m - 1] = S::one();
    let mut mu = solve(a, b)?;
    // Round-off can leave -1e-17 entries on near-transient coordinates.
    for v in mu.iter_mut() {
        if *v < S::zero() {
            *v = S::zero();
        }
    }
    Ok(mu)
}
