use crate::error::{Error, Result};
use crate::scalar::{min_of, Scalar};

/// Probability vector indexed by state position.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist<S> {
    weights: Vec<S>,
}

impl<S: Scalar> Dist<S> {
    /// Validates non-negativity and unit mass (within [`Scalar::tolerance`]).
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        let mut sum = S::zero();
        for (i, w) in weights.iter().enumerate() {
            if w < &S::zero() {
                return Err(Error::NegativeWeight(i));
            }
            sum = sum + w.clone();
        }
        if (sum.clone() - S::one()).abs() > S::tolerance() {
            return Err(Error::DistSum(sum.to_string()));
        }
        Ok(Self { weights })
    }

    /// Wraps weights produced by stochastic operations on valid inputs.
    pub(crate) fn from_weights_unchecked(weights: Vec<S>) -> Self {
        Self { weights }
    }

    pub fn point(len: usize, at: usize) -> Self {
        let mut weights = vec![S::zero(); len];
        weights[at] = S::one();
        Self { weights }
    }

    pub fn uniform(len: usize) -> Self {
        let w = S::one() / S::from_usize(len);
        Self { weights: vec![w; len] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<S> {
        self.weights
    }

    pub fn get(&self, i: usize) -> &S {
        &self.weights[i]
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| *w > &S::zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_mass(&self) -> S {
        self.weights.iter().fold(S::zero(), |acc, w| acc + w.clone())
    }

    /// `Σ min(self(i), other(i))`, the mass shared by both laws.
    pub fn overlap(&self, other: &Self) -> Result<S> {
        self.check_same_len(other)?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .fold(S::zero(), |acc, (a, b)| acc + min_of(a, b)))
    }

    /// See [`total_variation`].
    pub fn total_variation(&self, other: &Self) -> Result<S> {
        total_variation(self, other)
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }
}

/// Total variation of the signed measure `d1 - d2`, i.e. `Σ |d1(i) - d2(i)|`.
///
/// The range is `[0, 2]`; mutually singular laws are at distance exactly 2.
pub fn total_variation<S: Scalar>(d1: &Dist<S>, d2: &Dist<S>) -> Result<S> {
    d1.check_same_len(d2)?;
    Ok(d1
        .weights
        .iter()
        .zip(&d2.weights)
        .fold(S::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        let d = Dist::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(total_variation(&d, &d).unwrap(), 0.0);
        let a = Dist::<f64>::point(2, 0);
        let b = Dist::<f64>::point(2, 1);
        assert_eq!(total_variation(&a, &b).unwrap(), 2.0);
        let x = Dist::new(vec![0.5f64, 0.5]).unwrap();
        let y = Dist::new(vec![0.2, 0.8]).unwrap();
        assert!((total_variation(&x, &y).unwrap() - 0.6).abs() < 1e-15);
        assert!((x.overlap(&y).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn mismatched_lengths() {
        let a = Dist::<f64>::point(2, 0);
        let b = Dist::<f64>::point(3, 0);
        assert_eq!(
            total_variation(&a, &b),
            Err(Error::SizeMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn validation() {
        assert_eq!(Dist::new(vec![0.5, 0.6]).unwrap_err(), Error::DistSum("1.1".into()));
        assert_eq!(Dist::new(vec![1.5, -0.5]).unwrap_err(), Error::NegativeWeight(1));
        assert_eq!(Dist::<f64>::new(vec![]).unwrap_err(), Error::Empty);
        assert_eq!(Dist::<f64>::uniform(4).support(), vec![0, 1, 2, 3]);
    }
}
