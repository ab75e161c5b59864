//! Checking the equivalence / non-singularity assumptions and the
//! total-variation conclusion on concrete chains.

use std::fmt;
use std::str::FromStr;

use crate::chain::{
    invariant_measures, total_variation, CountableChain, Dist, FiniteChain, SupportTable,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default distance below which a curve counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-8;
/// Default number of steps a convergence curve is followed.
pub const DEFAULT_HORIZON: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Largest `n` tried when looking for `n_{x,y}`.
    pub n_max: usize,
    pub horizon: usize,
    pub threshold: f64,
}

impl VerifyOptions {
    /// `n_max = k² + 1` covers the primitivity index `(k−1)² + 1` of any
    /// `k`-state irreducible aperiodic chain.
    pub fn for_states(k: usize) -> Self {
        Self { n_max: k * k + 1, horizon: DEFAULT_HORIZON, threshold: CONVERGENCE_THRESHOLD }
    }
}

/// Which result applies to a chain, in decreasing strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Equivalence holds for every pair and every start converges.
    Theorem1,
    /// Equivalence holds for every pair but some curve did not reach the
    /// threshold within the horizon.
    Theorem1Unconfirmed,
    /// Non-singularity holds for every pair, equivalence does not.
    Corollary1,
    /// Unique invariant law; non-singularity holds on its support only.
    Theorem2,
    /// Several extreme invariant laws, each satisfying non-singularity on
    /// its own support: no uniqueness.
    Theorem2PerIpm,
    NoAssumptions,
}

impl Classification {
    pub const ALL: [Self; 6] = [
        Self::Theorem1,
        Self::Theorem1Unconfirmed,
        Self::Corollary1,
        Self::Theorem2,
        Self::Theorem2PerIpm,
        Self::NoAssumptions,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Theorem1 => "theorem1",
            Self::Theorem1Unconfirmed => "theorem1-unconfirmed",
            Self::Corollary1 => "corollary1",
            Self::Theorem2 => "theorem2",
            Self::Theorem2PerIpm => "theorem2-per-ipm",
            Self::NoAssumptions => "no-assumptions",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Self::Theorem1 => "Theorem 1 applies; conclusion verified",
            Self::Theorem1Unconfirmed => {
                "Theorem 1 applies; convergence not reached within the horizon"
            }
            Self::Corollary1 => "only Corollary 1 assumptions hold; conclusion checked μ-a.e.",
            Self::Theorem2 => "only Theorem 2 assumptions hold; conclusion checked μ-a.e.",
            Self::Theorem2PerIpm => {
                "Theorem 2 assumptions hold per extreme ipm; invariant law not unique"
            }
            Self::NoAssumptions => "assumptions fail",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown classification `{s}`")))
    }
}

/// Convergence record of one start state towards one invariant law.
#[derive(Debug, Clone, PartialEq)]
pub struct StartConvergence<S> {
    pub state: usize,
    /// First `n` with `‖P_n(x,·) − μ‖ < threshold`.
    pub converged_at: Option<usize>,
    /// Distance at `converged_at`, or at the horizon.
    pub last_distance: S,
    /// No increase beyond `1e-12` along the followed part of the curve.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpmVerdict<S> {
    pub measure: Dist<S>,
    pub support: Vec<usize>,
    /// Non-singularity for every pair in `supp μ × supp μ`.
    pub thm2_assumption: bool,
    /// One record per state of the chain.
    pub starts: Vec<StartConvergence<S>>,
    /// Every start in `supp μ` converges.
    pub conclusion_mu_ae: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoobVerdict<S> {
    pub options: VerifyOptions,
    pub ipm_count: usize,
    pub ipms: Vec<IpmVerdict<S>>,
    /// `thm1_assumption[x][y]`: smallest `n` with `P_n(x,·) ~ P_n(y,·)`.
    pub thm1_assumption: Vec<Vec<Option<usize>>>,
    /// `cor1_assumption[x][y]`: smallest `n` with non-singular laws.
    pub cor1_assumption: Vec<Vec<Option<usize>>>,
    pub thm1_holds: bool,
    pub cor1_holds: bool,
    /// Theorem 2's assumption holds for every extreme invariant law.
    pub thm2_holds: bool,
    /// Unique invariant law and every start converges to it.
    pub conclusion_allx: bool,
    /// For every extreme law, every start in its support converges.
    pub conclusion_mu_ae: bool,
    pub curves_monotone: bool,
    pub classification: Classification,
}

/// Follows `‖P_n(x,·) − μ‖` until it drops below the threshold or the
/// horizon is reached.
fn follow_curve<S: Scalar>(
    chain: &FiniteChain<S>,
    x: usize,
    mu: &Dist<S>,
    opts: &VerifyOptions,
) -> Result<StartConvergence<S>> {
    let threshold = S::lossy_from_f64(opts.threshold);
    let slack = S::lossy_from_f64(1e-12);
    let mut d = Dist::point(chain.len(), x);
    let mut prev: Option<S> = None;
    let mut monotone = true;
    for n in 0..=opts.horizon {
        if n > 0 {
            d = chain.step(&d);
        }
        let tv = total_variation(&d, mu)?;
        if let Some(p) = &prev {
            monotone &= tv <= p.clone() + slack.clone();
        }
        if tv < threshold {
            return Ok(StartConvergence { state: x, converged_at: Some(n), last_distance: tv, monotone });
        }
        prev = Some(tv);
    }
    Ok(StartConvergence {
        state: x,
        converged_at: None,
        last_distance: prev.unwrap_or_else(S::zero),
        monotone,
    })
}

fn classify(
    thm1: bool,
    cor1: bool,
    thm2: bool,
    ipm_count: usize,
    conclusion_allx: bool,
) -> Classification {
    if thm1 {
        if conclusion_allx {
            Classification::Theorem1
        } else {
            Classification::Theorem1Unconfirmed
        }
    } else if cor1 {
        Classification::Corollary1
    } else if thm2 {
        if ipm_count == 1 {
            Classification::Theorem2
        } else {
            Classification::Theorem2PerIpm
        }
    } else {
        Classification::NoAssumptions
    }
}

/// Evaluates every assumption and conclusion on a finite chain.
///
/// With several extreme invariant laws the Theorem 2 check and the μ-a.e.
/// conclusion are evaluated per law.
pub fn verify_doob<S: Scalar>(chain: &FiniteChain<S>, opts: VerifyOptions) -> Result<DoobVerdict<S>> {
    if opts.n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let k = chain.len();
    let table = SupportTable::new(chain, opts.n_max);
    let thm1_assumption: Vec<Vec<Option<usize>>> =
        (0..k).map(|x| (0..k).map(|y| table.equivalence(x, y)).collect()).collect();
    let cor1_assumption: Vec<Vec<Option<usize>>> =
        (0..k).map(|x| (0..k).map(|y| table.nonsingular(x, y)).collect()).collect();
    let thm1_holds = thm1_assumption.iter().flatten().all(Option::is_some);
    let cor1_holds = cor1_assumption.iter().flatten().all(Option::is_some);

    let measures = invariant_measures(chain)?;
    let ipm_count = measures.len();
    let mut ipms = Vec::with_capacity(ipm_count);
    for measure in measures {
        let support = measure.support();
        let thm2_assumption = support
            .iter()
            .all(|&x| support.iter().all(|&y| cor1_assumption[x][y].is_some()));
        let starts = (0..k)
            .map(|x| follow_curve(chain, x, &measure, &opts))
            .collect::<Result<Vec<_>>>()?;
        let conclusion_mu_ae = support.iter().all(|&x| starts[x].converged_at.is_some());
        ipms.push(IpmVerdict { measure, support, thm2_assumption, starts, conclusion_mu_ae });
    }
    let thm2_holds = ipms.iter().all(|v| v.thm2_assumption);
    let conclusion_allx = ipm_count == 1 && ipms[0].starts.iter().all(|s| s.converged_at.is_some());
    let conclusion_mu_ae = ipms.iter().all(|v| v.conclusion_mu_ae);
    let curves_monotone = ipms.iter().flat_map(|v| &v.starts).all(|s| s.monotone);
    let classification = classify(thm1_holds, cor1_holds, thm2_holds, ipm_count, conclusion_allx);
    Ok(DoobVerdict {
        options: opts,
        ipm_count,
        ipms,
        thm1_assumption,
        cor1_assumption,
        thm1_holds,
        cor1_holds,
        thm2_holds,
        conclusion_allx,
        conclusion_mu_ae,
        curves_monotone,
        classification,
    })
}

/// Verdict for a birth-death chain over the starts `0..=max_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountableVerdict<S> {
    pub options: VerifyOptions,
    pub max_start: u64,
    /// Whether an invariant probability exists (it is then unique).
    pub has_ipm: bool,
    /// `μ(0..=max_start)` when it exists.
    pub ipm_head: Vec<S>,
    pub thm1_assumption: Vec<Vec<Option<usize>>>,
    pub cor1_assumption: Vec<Vec<Option<usize>>>,
    pub thm1_holds: bool,
    pub cor1_holds: bool,
    pub starts: Vec<StartConvergence<S>>,
    /// Every start in `0..=max_start` converges.
    pub conclusion_allx: bool,
    /// Every start in `supp μ ∩ 0..=max_start` converges.
    pub conclusion_mu_ae: bool,
    pub classification: Classification,
}

/// Same checks as [`verify_doob`] on a countable chain, restricted to the
/// starts `0..=max_start`. Laws are computed exactly (their supports are
/// finite); the invariant law comes from detailed balance.
pub fn verify_countable<S: Scalar>(
    chain: &CountableChain<S>,
    max_start: u64,
    opts: VerifyOptions,
) -> Result<CountableVerdict<S>> {
    let starts_range = 0..=max_start;
    let thm1_assumption: Vec<Vec<Option<usize>>> = starts_range
        .clone()
        .map(|x| starts_range.clone().map(|y| chain.check_equivalence(x, y, opts.n_max)).collect())
        .collect();
    let cor1_assumption: Vec<Vec<Option<usize>>> = starts_range
        .clone()
        .map(|x| starts_range.clone().map(|y| chain.check_nonsingular(x, y, opts.n_max)).collect())
        .collect();
    let thm1_holds = thm1_assumption.iter().flatten().all(Option::is_some);
    let cor1_holds = cor1_assumption.iter().flatten().all(Option::is_some);
    let Some(head) = chain.invariant_truncated(max_start) else {
        return Ok(CountableVerdict {
            options: opts,
            max_start,
            has_ipm: false,
            ipm_head: Vec::new(),
            thm1_assumption,
            cor1_assumption,
            thm1_holds,
            cor1_holds,
            starts: Vec::new(),
            conclusion_allx: false,
            conclusion_mu_ae: false,
            classification: Classification::NoAssumptions,
        });
    };
    let threshold = S::lossy_from_f64(opts.threshold);
    let slack = S::lossy_from_f64(1e-12);
    let mut starts = Vec::new();
    for x in starts_range.clone() {
        let curve = chain.convergence_curve(x, opts.horizon)?;
        let converged_at = curve.iter().position(|v| *v < threshold);
        let end = converged_at.unwrap_or(opts.horizon);
        let monotone = curve[..=end].windows(2).all(|w| w[1] <= w[0].clone() + slack.clone());
        starts.push(StartConvergence {
            state: x as usize,
            converged_at,
            last_distance: curve[end].clone(),
            monotone,
        });
    }
    let conclusion_allx = starts.iter().all(|s| s.converged_at.is_some());
    let conclusion_mu_ae = starts
        .iter()
        .filter(|s| head.weights[s.state] > S::zero())
        .all(|s| s.converged_at.is_some());
    let classification = if thm1_holds {
        classify(true, true, true, 1, conclusion_allx)
    } else if cor1_holds {
        Classification::Corollary1
    } else {
        Classification::NoAssumptions
    };
    Ok(CountableVerdict {
        options: opts,
        max_start,
        has_ipm: true,
        ipm_head: head.weights,
        thm1_assumption,
        cor1_assumption,
        thm1_holds,
        cor1_holds,
        starts,
        conclusion_allx,
        conclusion_mu_ae,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::BirthDeath;

    fn dense(m: Vec<Vec<f64>>) -> FiniteChain<f64> {
        FiniteChain::from_dense(m).unwrap()
    }

    #[test]
    fn two_state_theorem1() {
        let a = dense(vec![vec![0.5, 0.5], vec![0.2, 0.8]]);
        let v = verify_doob(&a, VerifyOptions::for_states(2)).unwrap();
        assert_eq!(v.classification, Classification::Theorem1);
        assert_eq!(v.ipm_count, 1);
        assert_eq!(v.thm1_assumption[0][1], Some(1));
        assert!(v.conclusion_allx && v.curves_monotone);
    }

    #[test]
    fn identity_reproduces_reducible_case() {
        let id = dense(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let v = verify_doob(&id, VerifyOptions::for_states(2)).unwrap();
        assert_eq!(v.ipm_count, 2);
        assert!(v.thm2_holds && !v.cor1_holds);
        assert_eq!(v.classification, Classification::Theorem2PerIpm);
        assert!(v.conclusion_mu_ae && !v.conclusion_allx);
    }

    #[test]
    fn swap_fails_everything() {
        let s = dense(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let opts = VerifyOptions { n_max: 100, horizon: 200, threshold: 1e-8 };
        let v = verify_doob(&s, opts).unwrap();
        assert_eq!(v.classification, Classification::NoAssumptions);
        assert_eq!(v.ipm_count, 1);
        assert!(!v.conclusion_allx);
        assert!(v.ipms[0].starts.iter().all(|s| s.last_distance == 1.0));
    }

    #[test]
    fn transient_state_gives_corollary1() {
        // State 2 is transient and feeds the aperiodic class {0, 1}.
        let c = dense(vec![vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5]]);
        let v = verify_doob(&c, VerifyOptions::for_states(3)).unwrap();
        assert!(!v.thm1_holds && v.cor1_holds);
        assert_eq!(v.classification, Classification::Corollary1);
        assert!(v.conclusion_allx);
    }

    #[test]
    fn labels_round_trip() {
        for c in Classification::ALL {
            assert_eq!(c.label().parse::<Classification>().unwrap(), c);
        }
        assert!("nope".parse::<Classification>().is_err());
    }

    #[test]
    fn countable_drift_down_converges_without_equivalence() {
        let c = CountableChain::birth_death(BirthDeath::new(0.5, 0.5, 2.0 / 3.0, 0.0, 1.0 / 3.0).unwrap());
        let opts = VerifyOptions { n_max: 20, horizon: 800, threshold: 1e-8 };
        let v = verify_countable(&c, 3, opts).unwrap();
        assert!(!v.thm1_holds && v.cor1_holds);
        assert!(v.conclusion_allx, "{:?}", v.starts);
        assert_eq!(v.classification, Classification::Corollary1);
    }

    #[test]
    fn countable_counterexample_fails_off_zero() {
        let c = CountableChain::birth_death(BirthDeath::new(1.0, 0.0, 1.0 / 3.0, 0.0, 2.0 / 3.0).unwrap());
        let opts = VerifyOptions { n_max: 20, horizon: 300, threshold: 1e-8 };
        let v = verify_countable(&c, 3, opts).unwrap();
        assert!(v.cor1_holds && !v.thm1_holds);
        assert!(v.conclusion_mu_ae && !v.conclusion_allx);
        assert_eq!(v.starts[0].converged_at, Some(0));
        // Limit distance 2(1 − 2^{-i}).
        for i in 1..=3 {
            let limit = 2.0 * (1.0 - 0.5f64.powi(i));
            assert!((v.starts[i as usize].last_distance - limit).abs() < 1e-6);
        }
    }
}
