//! The pair set `C_{N,p}` on which coupling attempts are made.

use crate::chain::{total_variation, Dist, FiniteChain};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pairs whose `N`-step laws overlap by at least `p`:
/// `‖P_N(x,·) − P_N(y,·)‖ ≤ 2(1 − p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeblinSet<S> {
    step_len: usize,
    p: S,
    len: usize,
    members: Vec<bool>,
    /// `(μ ⊗ μ)(C)` for each measure supplied at construction.
    pub masses: Vec<S>,
}

impl<S: Scalar> DoeblinSet<S> {
    /// `N`.
    pub fn step_len(&self) -> usize {
        self.step_len
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn state_count(&self) -> usize {
        self.len
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.len && y < self.len && self.members[x * self.len + y]
    }

    pub fn members(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len * self.len).filter(|k| self.members[*k]).map(|k| (k / self.len, k % self.len))
    }

    pub fn member_count(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    pub fn mass_under(&self, mu: &Dist<S>) -> S {
        self.members().fold(S::zero(), |acc, (x, y)| acc + mu.get(x).clone() * mu.get(y).clone())
    }
}

/// `N`-step laws of every state.
fn step_laws<S: Scalar>(chain: &FiniteChain<S>, n: usize) -> Vec<Dist<S>> {
    (0..chain.len()).map(|x| chain.n_step_from(&Dist::point(chain.len(), x), n)).collect()
}

/// Builds `C_{N,p}` from exact `N`-step laws and reports its mass under each
/// of `measures`.
///
/// Membership allows [`Scalar::tolerance`] of slack so that pairs sitting
/// exactly on the threshold are not lost to rounding.
pub fn doeblin_set<S: Scalar>(
    chain: &FiniteChain<S>,
    step_len: usize,
    p: S,
    measures: &[Dist<S>],
) -> Result<DoeblinSet<S>> {
    if step_len == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(p > S::zero() && p < S::one()) {
        return Err(Error::InvalidParameter(format!("p = {p} is outside (0, 1)")));
    }
    let laws = step_laws(chain, step_len);
    let len = chain.len();
    let threshold = (S::one() + S::one()) * (S::one() - p.clone()) + S::tolerance();
    let mut members = vec![false; len * len];
    for x in 0..len {
        for y in 0..len {
            members[x * len + y] = x == y || total_variation(&laws[x], &laws[y])? <= threshold;
        }
    }
    let mut set = DoeblinSet { step_len, p, len, members, masses: Vec::new() };
    set.masses = measures.iter().map(|mu| set.mass_under(mu)).collect();
    Ok(set)
}

/// Chooses `(N, p)` with `N ≤ n_max` for the fastest guaranteed coupling
/// rate per base step.
///
/// A pair drawn from `μ⊗μ` is coupled at one attempt with probability at
/// least `p · (μ⊗μ)(C_{N,p})`, and attempts cost `N` base steps, so the score
/// minimised is `(1 − p · mass)^{1/N}`. For a fixed `N` this is maximising
/// `p · mass`. Candidate values of `p` are the overlaps `1 − TV_N(x,y)/2` of
/// off-diagonal pairs lying strictly inside `(0, 1)`. Ties (within
/// [`Scalar::tolerance`]) go to the smaller `N`, then the larger `p`. When
/// every off-diagonal overlap is exactly one (or there are no off-diagonal
/// pairs) any `p` works and `1/2` is used.
pub fn select_doeblin<S: Scalar>(
    chain: &FiniteChain<S>,
    mu: &Dist<S>,
    n_max: usize,
) -> Result<DoeblinSet<S>> {
    let residual = chain.invariance_residual(mu)?;
    if residual > S::lossy_from_f64(1e-10) {
        return Err(Error::NotInvariant(residual.to_string()));
    }
    let len = chain.len();
    let tol = S::tolerance();
    let two = S::one() + S::one();
    let mut laws: Vec<Dist<S>> = (0..len).map(|x| Dist::point(len, x)).collect();
    let mut best: Option<(S, usize, S)> = None; // (failure factor, N, p)
    let mut full_overlap_at: Option<usize> = None;
    for n in 1..=n_max {
        laws = laws.iter().map(|d| chain.step(d)).collect();
        // (overlap, weight) for every off-diagonal pair.
        let mut pairs: Vec<(S, S)> = Vec::with_capacity(len * len);
        let mut diag_mass = S::zero();
        for x in 0..len {
            diag_mass = diag_mass + mu.get(x).clone() * mu.get(x).clone();
            for y in 0..len {
                if x != y {
                    let overlap = S::one() - total_variation(&laws[x], &laws[y])? / two.clone();
                    pairs.push((overlap, mu.get(x).clone() * mu.get(y).clone()));
                }
            }
        }
        if full_overlap_at.is_none() && pairs.iter().all(|(o, _)| *o >= S::one() - tol.clone()) {
            full_overlap_at = Some(n);
        }
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("overlaps are comparable"));
        // Walk candidates in decreasing p; mass is the running total of pairs
        // with overlap ≥ p (within tolerance).
        let mut mass = diag_mass;
        let mut k = 0;
        while k < pairs.len() {
            let p = pairs[k].0.clone();
            while k < pairs.len() && pairs[k].0 >= p.clone() - tol.clone() {
                mass = mass + pairs[k].1.clone();
                k += 1;
            }
            if p > tol && p < S::one() - tol.clone() {
                let failure = S::one() - p.clone() * mass.clone();
                let better = match &best {
                    None => true,
                    // f^{1/n} < g^{1/m}  ⇔  f^m < g^n
                    Some((g, m, _)) => {
                        num_traits::pow(failure.clone(), *m) + tol.clone()
                            < num_traits::pow(g.clone(), n)
                    }
                };
                if better {
                    best = Some((failure, n, p));
                }
            }
        }
    }
    let (step_len, p) = match (best, full_overlap_at) {
        (Some((_, n, p)), _) => (n, p),
        (None, Some(n)) => (n, S::one() / (S::one() + S::one())),
        (None, None) => return Err(Error::AssumptionsFail { n_max }),
    };
    doeblin_set(chain, step_len, p, std::slice::from_ref(mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_a() -> FiniteChain<f64> {
        FiniteChain::from_dense(vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn boundary_membership() {
        let a = chain_a();
        let c = doeblin_set(&a, 1, 0.7, &[]).unwrap();
        assert_eq!(c.member_count(), 4);
        let c = doeblin_set(&a, 1, 0.8, &[]).unwrap();
        assert_eq!(c.members().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert!(doeblin_set(&a, 0, 0.5, &[]).is_err());
        assert!(doeblin_set(&a, 1, 1.0, &[]).is_err());
    }

    #[test]
    fn selection_on_two_state() {
        let a = chain_a();
        let mu = Dist::new(vec![2.0 / 7.0, 5.0 / 7.0]).unwrap();
        let c = select_doeblin(&a, &mu, 3).unwrap();
        assert_eq!(c.step_len(), 1);
        assert!((c.p() - 0.7).abs() < 1e-12);
        assert!((c.masses[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selection_fails_without_overlap() {
        let id = FiniteChain::from_dense(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(
            select_doeblin(&id, &Dist::point(2, 0), 5),
            Err(Error::AssumptionsFail { n_max: 5 })
        );
        let swap = FiniteChain::from_dense(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(select_doeblin(&swap, &Dist::uniform(2), 8).is_err());
    }

    #[test]
    fn identical_rows_fall_back_to_half() {
        let c = FiniteChain::from_dense(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let mu = Dist::new(vec![0.3, 0.7]).unwrap();
        let set = select_doeblin(&c, &mu, 2).unwrap();
        assert_eq!(*set.p(), 0.5);
        assert_eq!(set.member_count(), 4);
    }

    #[test]
    fn diagonal_always_included() {
        let a = chain_a();
        for n in 1..4 {
            let c = doeblin_set(&a, n, 0.99, &[]).unwrap();
            assert!(c.contains(0, 0) && c.contains(1, 1));
        }
    }
}
