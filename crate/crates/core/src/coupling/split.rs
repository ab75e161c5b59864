//! Splitting two rows into a shared part and disjoint residuals, and the
//! maximal coupling assembled from it.

use crate::chain::{Dist, FiniteChain};
use crate::error::Result;
use crate::scalar::{min_of, Scalar};

use super::joint::JointDist;

/// `P(x_i, ·) = overlap_mass · common_part + (1 − overlap_mass) · residual_i`.
///
/// When a part carries zero weight (`overlap_mass` equal to 0 or 1) it is
/// replaced by the point mass at state 0, which never contributes.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingParts<S> {
    pub overlap_mass: S,
    pub common_part: Dist<S>,
    pub residual_1: Dist<S>,
    pub residual_2: Dist<S>,
}

impl<S: Scalar> SplittingParts<S> {
    /// `overlap_mass · part + (1 − overlap_mass) · residual_i`.
    pub fn reconstruct(&self, which: usize) -> Dist<S> {
        let residual = if which == 1 { &self.residual_1 } else { &self.residual_2 };
        let rest = S::one() - self.overlap_mass.clone();
        let w = self
            .common_part
            .weights()
            .iter()
            .zip(residual.weights())
            .map(|(c, r)| self.overlap_mass.clone() * c.clone() + rest.clone() * r.clone())
            .collect();
        Dist::from_weights_unchecked(w)
    }
}

/// Splits the two laws `d1`, `d2` along their pointwise minimum.
pub fn split_laws<S: Scalar>(d1: &Dist<S>, d2: &Dist<S>) -> Result<SplittingParts<S>> {
    let shared = d1.overlap(d2)?;
    let len = d1.len();
    let floor: Vec<S> = d1.weights().iter().zip(d2.weights()).map(|(a, b)| min_of(a, b)).collect();
    let normalise = |raw: Vec<S>| {
        let mass = raw.iter().fold(S::zero(), |acc, w| acc + w.clone());
        if mass > S::zero() {
            Dist::from_weights_unchecked(raw.into_iter().map(|w| w / mass.clone()).collect())
        } else {
            Dist::point(len, 0)
        }
    };
    let excess = |d: &Dist<S>| -> Vec<S> {
        d.weights().iter().zip(&floor).map(|(a, m)| a.clone() - m.clone()).collect()
    };
    let (e1, e2) = (excess(d1), excess(d2));
    // If either law lies below the other everywhere they are equal, and any
    // shortfall of `shared` from 1 is rounding.
    let exhausted = |e: &[S]| e.iter().all(|w| *w <= S::zero());
    let overlap_mass = if exhausted(&e1) || exhausted(&e2) { S::one() } else { shared };
    Ok(SplittingParts {
        overlap_mass,
        common_part: normalise(floor),
        residual_1: normalise(e1),
        residual_2: normalise(e2),
    })
}

/// Splitting of the rows `P(x1, ·)` and `P(x2, ·)`.
pub fn split<S: Scalar>(chain: &FiniteChain<S>, x1: usize, x2: usize) -> Result<SplittingParts<S>> {
    chain.check_state(x1)?;
    chain.check_state(x2)?;
    split_laws(&chain.row_dist(x1), &chain.row_dist(x2))
}

/// Image of `common_part` under `y ↦ (y, y)`; empty when the overlap is 0.
pub fn diagonal_part<S: Scalar>(parts: &SplittingParts<S>) -> JointDist<S> {
    if parts.overlap_mass <= S::zero() {
        return JointDist::collect(Vec::new());
    }
    JointDist::collect(
        parts.common_part.weights().iter().cloned().enumerate().map(|(y, w)| ((y, y), w)).collect(),
    )
}

/// `residual_1 ⊗ residual_2`; it puts no mass on the diagonal because the
/// residual supports are disjoint. Empty when the overlap is 1.
pub fn residual_part<S: Scalar>(parts: &SplittingParts<S>) -> JointDist<S> {
    if parts.overlap_mass >= S::one() {
        return JointDist::collect(Vec::new());
    }
    JointDist::product(&parts.residual_1, &parts.residual_2)
}

/// Maximal coupling of two laws assembled from their splitting.
pub fn maximal_coupling<S: Scalar>(d1: &Dist<S>, d2: &Dist<S>) -> Result<JointDist<S>> {
    let parts = split_laws(d1, d2)?;
    Ok(assemble(&parts))
}

pub(crate) fn assemble<S: Scalar>(parts: &SplittingParts<S>) -> JointDist<S> {
    let p = parts.overlap_mass.clone();
    let rest = S::one() - p.clone();
    let mut entries = Vec::new();
    if p > S::zero() {
        entries.extend(diagonal_part(parts).entries().iter().map(|(z, w)| (*z, p.clone() * w.clone())));
    }
    if rest > S::zero() {
        entries.extend(residual_part(parts).entries().iter().map(|(z, w)| (*z, rest.clone() * w.clone())));
    }
    JointDist::collect(entries)
}

/// Row `Q((x1, x2), ·)` of the maximal-coupling kernel.
///
/// Its marginals are `P(x1, ·)` and `P(x2, ·)`, its diagonal mass is
/// `1 − ‖P(x1,·) − P(x2,·)‖ / 2`, and off the diagonal it is dominated by
/// the product of the two rows.
pub fn maximal_coupling_row<S: Scalar>(
    chain: &FiniteChain<S>,
    x1: usize,
    x2: usize,
) -> Result<JointDist<S>> {
    Ok(assemble(&split(chain, x1, x2)?))
}
