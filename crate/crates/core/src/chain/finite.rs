use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{max_of, Scalar};

use super::dist::{total_variation, Dist};

/// Row-stochastic transition matrix over labelled states, stored sparsely.
///
/// Rows keep only strictly positive entries, sorted by target index, so the
/// support of every row is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChain<S> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> FiniteChain<S> {
    /// Builds a chain from labels and sparse rows of `(target index, prob)`.
    ///
    /// Repeated targets within a row are summed. Rows must be non-negative
    /// and sum to one within [`Scalar::tolerance`]; nothing is renormalised.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<(usize, S)>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        if rows.len() != labels.len() {
            return Err(Error::SizeMismatch { left: labels.len(), right: rows.len() });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateState(l.clone()));
            }
        }
        let n = labels.len();
        let mut clean = Vec::with_capacity(n);
        for (from, row) in rows.into_iter().enumerate() {
            let mut dense: Vec<Option<S>> = vec![None; n];
            for (to, p) in row {
                if to >= n {
                    return Err(Error::StateOutOfRange { index: to, len: n });
                }
                if p < S::zero() {
                    return Err(Error::NegativeEntry {
                        state: labels[from].clone(),
                        target: labels[to].clone(),
                        value: p.to_string(),
                    });
                }
                dense[to] = Some(match dense[to].take() {
                    Some(acc) => acc + p,
                    None => p,
                });
            }
            let row: Vec<(usize, S)> = dense
                .into_iter()
                .enumerate()
                .filter_map(|(to, p)| p.filter(|p| *p > S::zero()).map(|p| (to, p)))
                .collect();
            let sum = row.iter().fold(S::zero(), |acc, (_, p)| acc + p.clone());
            if (sum.clone() - S::one()).abs() > S::tolerance() {
                return Err(Error::RowSum { state: labels[from].clone(), sum: sum.to_string() });
            }
            clean.push(row);
        }
        Ok(Self { labels, index, rows: clean })
    }

    /// Dense matrix with states labelled `"0"`, `"1"`, ...
    pub fn from_dense(matrix: Vec<Vec<S>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        let rows = matrix
            .into_iter()
            .map(|row| row.into_iter().enumerate().collect())
            .collect();
        Self::new(labels, rows)
    }

    /// Rows keyed by label, e.g. as read from a chain file.
    pub fn from_labeled(labels: Vec<String>, rows: Vec<(String, Vec<(String, S)>)>) -> Result<Self> {
        let lookup: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut indexed = vec![Vec::new(); labels.len()];
        let mut seen = vec![false; labels.len()];
        for (from, row) in rows {
            let &i = lookup.get(from.as_str()).ok_or_else(|| Error::UnknownState(from.clone()))?;
            if seen[i] {
                return Err(Error::DuplicateState(from));
            }
            seen[i] = true;
            for (to, p) in row {
                let &j = lookup.get(to.as_str()).ok_or(Error::UnknownState(to))?;
                indexed[i].push((j, p));
            }
        }
        Self::new(labels, indexed)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    pub fn check_state(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::StateOutOfRange { index: i, len: self.len() })
        }
    }

    /// Sparse row `P(x, ·)`.
    pub fn row(&self, x: usize) -> &[(usize, S)] {
        &self.rows[x]
    }

    pub fn row_dist(&self, x: usize) -> Dist<S> {
        let mut w = vec![S::zero(); self.len()];
        for (to, p) in &self.rows[x] {
            w[*to] = p.clone();
        }
        Dist::from_weights_unchecked(w)
    }

    pub fn prob(&self, x: usize, y: usize) -> S {
        self.rows[x]
            .binary_search_by_key(&y, |(to, _)| *to)
            .map(|k| self.rows[x][k].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    /// One step of the law: `(d P)(y) = Σ_x d(x) P(x, y)`.
    ///
    /// Summation runs over source states in ascending order.
    pub fn step(&self, d: &Dist<S>) -> Dist<S> {
        let mut next = vec![S::zero(); self.len()];
        for (from, w) in d.weights().iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (to, p) in &self.rows[from] {
                next[*to] = next[*to].clone() + w.clone() * p.clone();
            }
        }
        Dist::from_weights_unchecked(next)
    }

    /// Law of `X_n` under `P_x`.
    pub fn n_step(&self, x: usize, n: usize) -> Result<Dist<S>> {
        self.check_state(x)?;
        Ok(self.n_step_from(&Dist::point(self.len(), x), n))
    }

    pub fn n_step_from(&self, start: &Dist<S>, n: usize) -> Dist<S> {
        let mut d = start.clone();
        for _ in 0..n {
            d = self.step(&d);
        }
        d
    }

    /// The `n`-step chain with transition matrix `P^n` (`n ≥ 1`).
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("chain power must be at least 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let rows = (0..self.len())
            .map(|x| {
                let d = self.n_step_from(&Dist::point(self.len(), x), n);
                d.into_weights()
                    .into_iter()
                    .enumerate()
                    .filter(|(_, p)| *p > S::zero())
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Self { labels: self.labels.clone(), index: self.index.clone(), rows })
    }

    /// `max_y |(μP)(y) − μ(y)|`.
    pub fn invariance_residual(&self, mu: &Dist<S>) -> Result<S> {
        if mu.len() != self.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: mu.len() });
        }
        let image = self.step(mu);
        Ok(image
            .weights()
            .iter()
            .zip(mu.weights())
            .fold(S::zero(), |acc, (a, b)| max_of(&acc, &(a.clone() - b.clone()).abs())))
    }

    /// `‖P_n(x,·) − μ‖` for `n = 0..=n_max`.
    ///
    /// `mu` must be invariant within `1e-10`; the curve is then
    /// non-increasing.
    pub fn convergence_curve(&self, x: usize, mu: &Dist<S>, n_max: usize) -> Result<Vec<S>> {
        self.check_state(x)?;
        self.convergence_curve_from(&Dist::point(self.len(), x), mu, n_max)
    }

    pub fn convergence_curve_from(
        &self,
        start: &Dist<S>,
        mu: &Dist<S>,
        n_max: usize,
    ) -> Result<Vec<S>> {
        let residual = self.invariance_residual(mu)?;
        if residual > S::lossy_from_f64(1e-10) {
            return Err(Error::NotInvariant(residual.to_string()));
        }
        let mut curve = Vec::with_capacity(n_max + 1);
        let mut d = start.clone();
        for n in 0..=n_max {
            if n > 0 {
                d = self.step(&d);
            }
            let tv = total_variation(&d, mu)?;
            debug_assert!(curve
                .last()
                .is_none_or(|prev: &S| tv <= prev.clone() + S::lossy_from_f64(1e-12)));
            curve.push(tv);
        }
        Ok(curve)
    }
}
