//! Chains on the non-negative integers given by a rule rather than a matrix.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dist::Dist;
use super::finite::FiniteChain;

/// Finitely supported law on the non-negative integers.
pub type SparseDist<S> = BTreeMap<u64, S>;

/// Transition rule for the callback form: state → sparse row.
pub type TransitionRule<S> = Arc<dyn Fn(u64) -> Vec<(u64, S)> + Send + Sync>;

/// Birth-death walk on `{0, 1, 2, ...}` with its own rule at the boundary.
///
/// From `0`: hold with `zero_hold`, step up with `zero_up`. From `i ≥ 1`:
/// down with `down`, hold with `hold`, up with `up`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeath<S> {
    pub zero_hold: S,
    pub zero_up: S,
    pub down: S,
    pub hold: S,
    pub up: S,
}

impl<S: Scalar> BirthDeath<S> {
    /// Requires non-negative parameters, unit row sums and `down > 0`.
    pub fn new(zero_hold: S, zero_up: S, down: S, hold: S, up: S) -> Result<Self> {
        let all = [&zero_hold, &zero_up, &down, &hold, &up];
        if all.iter().any(|p| **p < S::zero()) {
            return Err(Error::InvalidParameter("birth-death probabilities must be >= 0".into()));
        }
        let boundary = zero_hold.clone() + zero_up.clone();
        if (boundary.clone() - S::one()).abs() > S::tolerance() {
            return Err(Error::RowSum { state: "0".into(), sum: boundary.to_string() });
        }
        let interior = down.clone() + hold.clone() + up.clone();
        if (interior.clone() - S::one()).abs() > S::tolerance() {
            return Err(Error::RowSum { state: "i>=1".into(), sum: interior.to_string() });
        }
        if down <= S::zero() {
            return Err(Error::InvalidParameter("down-probability must be positive".into()));
        }
        Ok(Self { zero_hold, zero_up, down, hold, up })
    }

    /// `up / down`, the ratio of consecutive stationary weights in the bulk.
    pub fn drift_ratio(&self) -> S {
        self.up.clone() / self.down.clone()
    }
}

/// Countable-state chain: either the parametric birth-death family or an
/// arbitrary in-process rule.
#[derive(Clone)]
pub enum CountableChain<S> {
    BirthDeath(BirthDeath<S>),
    Rule(TransitionRule<S>),
}

impl<S: fmt::Debug> fmt::Debug for CountableChain<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BirthDeath(bd) => f.debug_tuple("BirthDeath").field(bd).finish(),
            Self::Rule(_) => f.write_str("Rule(..)"),
        }
    }
}

/// Invariant law cut at `max_state`, with the exact mass beyond it.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedInvariant<S> {
    /// `μ(0), ..., μ(max_state)`.
    pub weights: Vec<S>,
    /// `μ({max_state + 1, ...})`.
    pub tail_mass: S,
}

impl<S: Scalar> CountableChain<S> {
    pub fn birth_death(bd: BirthDeath<S>) -> Self {
        Self::BirthDeath(bd)
    }

    pub fn from_rule(rule: impl Fn(u64) -> Vec<(u64, S)> + Send + Sync + 'static) -> Self {
        Self::Rule(Arc::new(rule))
    }

    /// Positive entries of `P(x, ·)`, ascending by target.
    pub fn row(&self, x: u64) -> Vec<(u64, S)> {
        let mut row = match self {
            Self::BirthDeath(bd) => {
                if x == 0 {
                    vec![(0, bd.zero_hold.clone()), (1, bd.zero_up.clone())]
                } else {
                    vec![(x - 1, bd.down.clone()), (x, bd.hold.clone()), (x + 1, bd.up.clone())]
                }
            }
            Self::Rule(rule) => rule(x),
        };
        row.retain(|(_, p)| *p > S::zero());
        row.sort_by_key(|(y, _)| *y);
        row
    }

    pub fn step(&self, d: &SparseDist<S>) -> SparseDist<S> {
        let mut next = SparseDist::new();
        for (x, w) in d {
            for (y, p) in self.row(*x) {
                let e = next.entry(y).or_insert_with(S::zero);
                *e = e.clone() + w.clone() * p;
            }
        }
        next
    }

    /// Exact law of `X_n` under `P_x`; its support is always finite.
    pub fn n_step(&self, x: u64, n: usize) -> SparseDist<S> {
        let mut d = SparseDist::from([(x, S::one())]);
        for _ in 0..n {
            d = self.step(&d);
        }
        d
    }

    /// Law of `X_n` restricted to `{0..=max_state}` plus the mass that left
    /// that window at some step (and is not followed further).
    pub fn n_step_truncated(&self, x: u64, n: usize, max_state: u64) -> (Dist<S>, S) {
        let len = max_state as usize + 1;
        let mut w = vec![S::zero(); len];
        let mut leaked = S::zero();
        if x <= max_state {
            w[x as usize] = S::one();
        } else {
            leaked = S::one();
        }
        for _ in 0..n {
            let mut next = vec![S::zero(); len];
            for (i, wi) in w.iter().enumerate() {
                if wi.is_zero() {
                    continue;
                }
                for (y, p) in self.row(i as u64) {
                    let m = wi.clone() * p;
                    if y <= max_state {
                        next[y as usize] = next[y as usize].clone() + m;
                    } else {
                        leaked = leaked + m;
                    }
                }
            }
            w = next;
        }
        (Dist::from_weights_unchecked(w), leaked)
    }

    /// Finite chain on `{0..=max_state}`; transitions above the window are
    /// redirected to `max_state`.
    pub fn truncate(&self, max_state: u64) -> Result<FiniteChain<S>> {
        let labels = (0..=max_state).map(|i| i.to_string()).collect();
        let rows = (0..=max_state)
            .map(|x| {
                self.row(x)
                    .into_iter()
                    .map(|(y, p)| (y.min(max_state) as usize, p))
                    .collect()
            })
            .collect();
        FiniteChain::new(labels, rows)
    }

    fn support_trace(&self, x: u64, n_max: usize) -> Vec<BTreeSet<u64>> {
        let mut out = Vec::with_capacity(n_max);
        let mut current = BTreeSet::from([x]);
        for _ in 0..n_max {
            current = current
                .iter()
                .flat_map(|z| self.row(*z).into_iter().map(|(y, _)| y))
                .collect();
            out.push(current.clone());
        }
        out
    }

    /// Smallest `n ≤ n_max` with equal supports of the `n`-step laws.
    pub fn check_equivalence(&self, x: u64, y: u64, n_max: usize) -> Option<usize> {
        if x == y {
            return (n_max >= 1).then_some(1);
        }
        let (a, b) = (self.support_trace(x, n_max), self.support_trace(y, n_max));
        a.iter().zip(&b).position(|(s, t)| s == t).map(|k| k + 1)
    }

    /// Smallest `n ≤ n_max` with intersecting supports of the `n`-step laws.
    pub fn check_nonsingular(&self, x: u64, y: u64, n_max: usize) -> Option<usize> {
        if x == y {
            return (n_max >= 1).then_some(1);
        }
        let (a, b) = (self.support_trace(x, n_max), self.support_trace(y, n_max));
        a.iter().zip(&b).position(|(s, t)| !s.is_disjoint(t)).map(|k| k + 1)
    }

    /// Invariant law of a birth-death chain, from detailed balance.
    ///
    /// `None` when no invariant probability exists (`up ≥ down` with an
    /// open boundary) or for rule-based chains.
    pub fn invariant_truncated(&self, max_state: u64) -> Option<TruncatedInvariant<S>> {
        let Self::BirthDeath(bd) = self else {
            return None;
        };
        let len = max_state as usize + 1;
        if bd.zero_up.is_zero() {
            let mut weights = vec![S::zero(); len];
            weights[0] = S::one();
            return Some(TruncatedInvariant { weights, tail_mass: S::zero() });
        }
        let ratio = bd.drift_ratio();
        if ratio >= S::one() {
            return None;
        }
        // Unnormalised weights: w_0 = 1, w_1 = zero_up / down, w_{i+1} = r w_i.
        let mut raw = Vec::with_capacity(len);
        raw.push(S::one());
        let mut next = bd.zero_up.clone() / bd.down.clone();
        for _ in 1..len {
            raw.push(next.clone());
            next = next * ratio.clone();
        }
        let tail = next / (S::one() - ratio);
        let total = raw.iter().fold(tail.clone(), |acc, w| acc + w.clone());
        Some(TruncatedInvariant {
            weights: raw.into_iter().map(|w| w / total.clone()).collect(),
            tail_mass: tail / total,
        })
    }

    /// `‖P_n(x,·) − μ‖` for `n = 0..=n_max`, exact up to scalar rounding.
    ///
    /// `μ` is the birth-death invariant law; the window is wide enough to
    /// contain every `P_n(x,·)`, so the beyond-window term is exactly
    /// `tail_mass`.
    pub fn convergence_curve(&self, x: u64, n_max: usize) -> Result<Vec<S>> {
        let window = match self {
            Self::BirthDeath(_) => x + n_max as u64,
            Self::Rule(_) => {
                return Err(Error::InvalidParameter(
                    "invariant law is only available for birth-death chains".into(),
                ))
            }
        };
        let inv = self
            .invariant_truncated(window)
            .ok_or_else(|| Error::InvalidParameter("chain has no invariant probability".into()))?;
        let mut d = SparseDist::from([(x, S::one())]);
        let mut curve = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            if n > 0 {
                d = self.step(&d);
            }
            curve.push(tv_against_truncated(&d, &inv));
        }
        Ok(curve)
    }
}

/// `Σ_i |law(i) − μ(i)|` for a law supported inside the invariant's window.
pub fn tv_against_truncated<S: Scalar>(law: &SparseDist<S>, inv: &TruncatedInvariant<S>) -> S {
    let mut acc = inv.tail_mass.clone();
    for (i, mu) in inv.weights.iter().enumerate() {
        let p = law.get(&(i as u64)).cloned().unwrap_or_else(S::zero);
        acc = acc + (p - mu.clone()).abs();
    }
    let window = inv.weights.len() as u64;
    for (_, p) in law.range(window..) {
        acc = acc + p.clone();
    }
    acc
}
