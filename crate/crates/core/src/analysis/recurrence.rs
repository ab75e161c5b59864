//! Probability of visiting a target set infinitely often, from structure.
//!
//! On a finite chain the path eventually enters a recurrent class and then
//! visits every state of it infinitely often. So `ψ(x)` is the probability
//! of absorption into the recurrent classes that meet the target.

use crate::chain::{structure, FiniteChain};
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::scalar::{max_of, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport<S> {
    /// `ψ(x) = P_x(X_n ∈ B infinitely often)`.
    pub psi: Vec<S>,
    pub target_set: Vec<usize>,
    /// Indices (into the chain structure) of recurrent classes meeting `B`.
    pub classes_hit: Vec<usize>,
    /// `max_x |ψ(x) − Σ_y P(x,y) ψ(y)|` over all states.
    pub harmonic_residual: S,
}

pub fn recurrence_psi<S: Scalar>(chain: &FiniteChain<S>, target: &[usize]) -> Result<RecurrenceReport<S>> {
    if target.is_empty() {
        return Err(Error::InvalidParameter("target set must be non-empty".into()));
    }
    let n = chain.len();
    let mut in_target = vec![false; n];
    for &b in target {
        chain.check_state(b)?;
        in_target[b] = true;
    }
    let st = structure(chain);
    let classes_hit: Vec<usize> = st
        .classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.recurrent && c.states.iter().any(|&x| in_target[x]))
        .map(|(k, _)| k)
        .collect();

    let mut psi = vec![S::zero(); n];
    let mut transient = Vec::new();
    for (x, value) in psi.iter_mut().enumerate() {
        let class = st.class_of[x];
        if st.classes[class].recurrent {
            if classes_hit.contains(&class) {
                *value = S::one();
            }
        } else {
            transient.push(x);
        }
    }
    if !transient.is_empty() {
        let mut pos = vec![usize::MAX; n];
        for (k, &x) in transient.iter().enumerate() {
            pos[x] = k;
        }
        let m = transient.len();
        // (I − P_TT) ψ_T = P(T → good classes)
        let mut a = vec![vec![S::zero(); m]; m];
        let mut b = vec![S::zero(); m];
        for (i, &x) in transient.iter().enumerate() {
            a[i][i] = S::one();
            for (y, p) in chain.row(x) {
                if pos[*y] != usize::MAX {
                    a[i][pos[*y]] = a[i][pos[*y]].clone() - p.clone();
                } else {
                    b[i] = b[i].clone() + p.clone() * psi[*y].clone();
                }
            }
        }
        let solved = solve(a, b)?;
        for (&x, v) in transient.iter().zip(solved) {
            psi[x] = clamp_unit(v);
        }
    }
    let harmonic_residual = (0..n).fold(S::zero(), |acc, x| {
        let image = chain.row(x).iter().fold(S::zero(), |s, (y, p)| s + p.clone() * psi[*y].clone());
        max_of(&acc, &(image - psi[x].clone()).abs())
    });
    Ok(RecurrenceReport { psi, target_set: target.to_vec(), classes_hit, harmonic_residual })
}

fn clamp_unit<S: Scalar>(v: S) -> S {
    if v < S::zero() {
        S::zero()
    } else if v > S::one() {
        S::one()
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gamblers_ruin_three_states() {
        let c = FiniteChain::from_dense(vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(1, 3), q(0, 1), q(2, 3)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
        ])
        .unwrap();
        let r = recurrence_psi(&c, &[0]).unwrap();
        assert_eq!(r.psi, vec![q(1, 1), q(1, 3), q(0, 1)]);
        assert_eq!(r.harmonic_residual, q(0, 1));
        assert_eq!(r.classes_hit.len(), 1);
    }

    #[test]
    fn irreducible_and_whole_space() {
        let a = FiniteChain::from_dense(vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
        assert_eq!(recurrence_psi(&a, &[1]).unwrap().psi, vec![1.0, 1.0]);
        let id = FiniteChain::from_dense(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(recurrence_psi(&id, &[0, 1]).unwrap().psi, vec![1.0, 1.0]);
        assert_eq!(recurrence_psi(&id, &[1]).unwrap().psi, vec![0.0, 1.0]);
    }

    #[test]
    fn bad_targets() {
        let a = FiniteChain::from_dense(vec![vec![1.0]]).unwrap();
        assert!(recurrence_psi(&a, &[]).is_err());
        assert!(recurrence_psi(&a, &[3]).is_err());
    }
}
