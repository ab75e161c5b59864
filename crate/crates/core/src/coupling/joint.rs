use crate::chain::Dist;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse law on ordered state pairs, sorted by pair, zero entries dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist<S> {
    entries: Vec<((usize, usize), S)>,
}

impl<S: Scalar> JointDist<S> {
    /// Validates non-negativity and unit mass; merges repeated pairs.
    pub fn new(entries: Vec<((usize, usize), S)>) -> Result<Self> {
        if entries.iter().any(|(_, w)| *w < S::zero()) {
            return Err(Error::InvalidParameter("joint law has a negative weight".into()));
        }
        let joint = Self::collect(entries);
        let sum = joint.total_mass();
        if (sum.clone() - S::one()).abs() > S::tolerance() {
            return Err(Error::DistSum(sum.to_string()));
        }
        Ok(joint)
    }

    pub(crate) fn collect(mut entries: Vec<((usize, usize), S)>) -> Self {
        entries.retain(|(_, w)| *w > S::zero());
        entries.sort_by_key(|(pair, _)| *pair);
        let mut merged: Vec<((usize, usize), S)> = Vec::with_capacity(entries.len());
        for (pair, w) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == pair => *acc = acc.clone() + w,
                _ => merged.push((pair, w)),
            }
        }
        Self { entries: merged }
    }

    pub fn point(a: usize, b: usize) -> Self {
        Self { entries: vec![((a, b), S::one())] }
    }

    /// `μ ⊗ ν`.
    pub fn product(mu: &Dist<S>, nu: &Dist<S>) -> Self {
        let mut entries = Vec::new();
        for a in mu.support() {
            for b in nu.support() {
                entries.push(((a, b), mu.get(a).clone() * nu.get(b).clone()));
            }
        }
        Self::collect(entries)
    }

    pub fn entries(&self) -> &[((usize, usize), S)] {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> S {
        self.entries
            .binary_search_by_key(&(a, b), |(p, _)| *p)
            .map(|k| self.entries[k].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn total_mass(&self) -> S {
        self.entries.iter().fold(S::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// Mass on the diagonal `{(y, y)}`.
    pub fn diagonal_mass(&self) -> S {
        self.entries
            .iter()
            .filter(|((a, b), _)| a == b)
            .fold(S::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn off_diagonal_mass(&self) -> S {
        self.entries
            .iter()
            .filter(|((a, b), _)| a != b)
            .fold(S::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// First-coordinate marginal on `len` states.
    pub fn first_marginal(&self, len: usize) -> Dist<S> {
        let mut w = vec![S::zero(); len];
        for ((a, _), p) in &self.entries {
            w[*a] = w[*a].clone() + p.clone();
        }
        Dist::from_weights_unchecked(w)
    }

    pub fn second_marginal(&self, len: usize) -> Dist<S> {
        let mut w = vec![S::zero(); len];
        for ((_, b), p) in &self.entries {
            w[*b] = w[*b].clone() + p.clone();
        }
        Dist::from_weights_unchecked(w)
    }
}
