//! Exact evolution of the coupled chain on the product space.

use crate::chain::total_variation;
use crate::coupling::{CouplingKernel, JointDist};
use crate::error::Result;
use crate::scalar::Scalar;

/// Initial law of the coupled chain.
#[derive(Debug, Clone, PartialEq)]
pub enum CoupledStart<S> {
    /// `Z_0 = (x1, x2)`.
    Pair(usize, usize),
    /// Arbitrary joint law, e.g. `μ ⊗ μ`.
    Law(JointDist<S>),
}

/// Coupling-time tails and total-variation curves of one exact run.
///
/// Index `n` refers to `n` kernel steps, i.e. `n · step_len` base steps.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingAnalysis<S> {
    pub step_len: usize,
    /// `P(Z¹_n ≠ Z²_n)`.
    pub uncoupled_tail: Vec<S>,
    /// `P(T > n)` with `T` the first entrance time of the diagonal.
    /// Equal to `uncoupled_tail` whenever the kernel keeps the diagonal.
    pub first_meeting_tail: Vec<S>,
    /// `‖P_n(x1,·) − P_n(x2,·)‖`, computed from the marginals of `Z_0`
    /// propagated by the chain itself, not read off the coupled law.
    pub tv_curve: Vec<S>,
    /// `2 · uncoupled_tail − tv_curve`; never below `-1e-12`.
    pub bound_slack: Vec<S>,
}

impl<S: Scalar> CouplingAnalysis<S> {
    /// Base-chain index of kernel step `n`.
    pub fn base_step(&self, n: usize) -> usize {
        n * self.step_len
    }

    pub fn min_slack(&self) -> Option<S> {
        self.bound_slack.iter().cloned().reduce(|a, b| if b < a { b } else { a })
    }
}

/// Evolves the law of `Z` for `n_max` kernel steps.
///
/// Fails when the product space exceeds the exact-mode cap.
pub fn evolve_coupled<S: Scalar>(
    kernel: &CouplingKernel<S>,
    start: &CoupledStart<S>,
    n_max: usize,
) -> Result<CouplingAnalysis<S>> {
    kernel.check_exact_size()?;
    let len = kernel.state_count();
    let start_law = match start {
        CoupledStart::Pair(a, b) => {
            kernel.step_chain().check_state(*a)?;
            kernel.step_chain().check_state(*b)?;
            JointDist::point(*a, *b)
        }
        CoupledStart::Law(law) => law.clone(),
    };
    let mut law = vec![S::zero(); len * len];
    for ((a, b), w) in start_law.entries() {
        kernel.step_chain().check_state(*a)?;
        kernel.step_chain().check_state(*b)?;
        law[a * len + b] = w.clone();
    }
    let mut alive: Vec<S> = law
        .iter()
        .enumerate()
        .map(|(k, w)| if k / len == k % len { S::zero() } else { w.clone() })
        .collect();
    let mut m1 = start_law.first_marginal(len);
    let mut m2 = start_law.second_marginal(len);

    let off_diagonal = |v: &[S]| {
        v.iter()
            .enumerate()
            .filter(|(k, _)| k / len != k % len)
            .fold(S::zero(), |acc, (_, w)| acc + w.clone())
    };
    let two = S::one() + S::one();
    let mut out = CouplingAnalysis {
        step_len: kernel.step_len(),
        uncoupled_tail: Vec::with_capacity(n_max + 1),
        first_meeting_tail: Vec::with_capacity(n_max + 1),
        tv_curve: Vec::with_capacity(n_max + 1),
        bound_slack: Vec::with_capacity(n_max + 1),
    };
    for n in 0..=n_max {
        if n > 0 {
            law = push_forward(kernel, &law, len)?;
            alive = push_forward(kernel, &alive, len)?;
            for y in 0..len {
                alive[y * len + y] = S::zero();
            }
            m1 = kernel.step_chain().step(&m1);
            m2 = kernel.step_chain().step(&m2);
        }
        let tail = off_diagonal(&law);
        let tv = total_variation(&m1, &m2)?;
        out.bound_slack.push(two.clone() * tail.clone() - tv.clone());
        out.uncoupled_tail.push(tail);
        out.first_meeting_tail.push(alive.iter().fold(S::zero(), |acc, w| acc + w.clone()));
        out.tv_curve.push(tv);
    }
    Ok(out)
}

// Pairs are visited in ascending order, and each row in its sorted order,
// so results do not depend on evaluation order.
fn push_forward<S: Scalar>(kernel: &CouplingKernel<S>, v: &[S], len: usize) -> Result<Vec<S>> {
    let mut next = vec![S::zero(); len * len];
    for (k, w) in v.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let row = kernel.row(k / len, k % len)?;
        for ((a, b), q) in row.entries() {
            let idx = a * len + b;
            next[idx] = next[idx].clone() + w.clone() * q.clone();
        }
    }
    Ok(next)
}

/// `1 − (1 − p)^k`: the solution of `p_{j+1} = p (1 − p_j) + p_j` from
/// `p_0 = 0`, a lower bound on the probability of having coupled within `k`
/// attempts that each succeed with probability at least `p`.
pub fn attempt_bound<S: Scalar>(p: &S, k: usize) -> S {
    S::one() - num_traits::pow(S::one() - p.clone(), k)
}
