//! Named fixtures and seeded random chains.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::analysis::Classification;
use crate::chain::{structure, BirthDeath, CountableChain, FiniteChain};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A gallery chain, finite or on the non-negative integers.
#[derive(Debug, Clone)]
pub enum GalleryChain<S> {
    Finite(FiniteChain<S>),
    Countable(CountableChain<S>),
}

impl<S> GalleryChain<S> {
    pub fn finite(&self) -> Option<&FiniteChain<S>> {
        match self {
            Self::Finite(c) => Some(c),
            Self::Countable(_) => None,
        }
    }

    pub fn countable(&self) -> Option<&CountableChain<S>> {
        match self {
            Self::Countable(c) => Some(c),
            Self::Finite(_) => None,
        }
    }
}

/// Verdict a fixture must reproduce under its default parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedVerdict {
    pub classification: Classification,
    pub ipm_count: usize,
    pub conclusion_allx: bool,
    pub conclusion_mu_ae: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalleryEntry {
    pub name: &'static str,
    /// Parameter names, in the order `build` expects them.
    pub param_names: &'static [&'static str],
    pub default_params: &'static [&'static str],
    pub countable: bool,
    pub description: &'static str,
    pub expected: ExpectedVerdict,
}

const fn verdict(classification: Classification, ipm_count: usize, allx: bool, mu_ae: bool) -> ExpectedVerdict {
    ExpectedVerdict { classification, ipm_count, conclusion_allx: allx, conclusion_mu_ae: mu_ae }
}

const ENTRIES: &[GalleryEntry] = &[
    GalleryEntry {
        name: "doob-counterexample",
        param_names: &[],
        default_params: &[],
        countable: true,
        description: "p(0,0)=1, p(i,i-1)=1/3, p(i,i+1)=2/3; unique ipm δ_0, no convergence off 0",
        expected: verdict(Classification::Corollary1, 1, false, true),
    },
    GalleryEntry {
        name: "remark3-drift-down",
        param_names: &[],
        default_params: &[],
        countable: true,
        description: "p(0,0)=p(0,1)=1/2, p(i,i-1)=2/3, p(i,i+1)=1/3; converges without equivalent laws",
        expected: verdict(Classification::Corollary1, 1, true, true),
    },
    GalleryEntry {
        name: "disconnected-two-classes",
        param_names: &[],
        default_params: &[],
        countable: false,
        description: "two closed aperiodic 2-state blocks; one ipm per block",
        expected: verdict(Classification::Theorem2PerIpm, 2, false, true),
    },
    GalleryEntry {
        name: "two-state",
        param_names: &["a", "b"],
        default_params: &["0.5", "0.2"],
        countable: false,
        description: "rows (1-a, a) and (b, 1-b)",
        expected: verdict(Classification::Theorem1, 1, true, true),
    },
    GalleryEntry {
        name: "swap",
        param_names: &[],
        default_params: &[],
        countable: false,
        description: "deterministic 0<->1; unique ipm (1/2,1/2), period 2",
        expected: verdict(Classification::NoAssumptions, 1, false, false),
    },
    GalleryEntry {
        name: "identity",
        param_names: &["k"],
        default_params: &["2"],
        countable: false,
        description: "k absorbing states; every point mass is invariant",
        expected: verdict(Classification::Theorem2PerIpm, 2, false, true),
    },
];

/// All fixtures, in listing order.
pub fn entries() -> &'static [GalleryEntry] {
    ENTRIES
}

pub fn entry(name: &str) -> Result<&'static GalleryEntry> {
    ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownGallery(name.to_string()))
}

fn parse<S: Scalar>(name: &str, raw: &str) -> Result<S> {
    S::parse_decimal(raw.trim())
        .ok_or_else(|| Error::InvalidParameter(format!("{name}: `{raw}` is not a number")))
}

/// Builds a fixture. Empty `params` selects the defaults.
pub fn build<S: Scalar>(name: &str, params: &[&str]) -> Result<GalleryChain<S>> {
    let e = entry(name)?;
    let params = if params.is_empty() { e.default_params } else { params };
    if params.len() != e.param_names.len() {
        return Err(Error::InvalidParameter(format!(
            "{name} takes {} parameter(s), got {}",
            e.param_names.len(),
            params.len()
        )));
    }
    let r = |n: usize, d: usize| S::from_usize(n) / S::from_usize(d);
    let chain = match name {
        "doob-counterexample" => GalleryChain::Countable(CountableChain::birth_death(BirthDeath::new(
            S::one(),
            S::zero(),
            r(1, 3),
            S::zero(),
            r(2, 3),
        )?)),
        "remark3-drift-down" => GalleryChain::Countable(CountableChain::birth_death(BirthDeath::new(
            r(1, 2),
            r(1, 2),
            r(2, 3),
            S::zero(),
            r(1, 3),
        )?)),
        "disconnected-two-classes" => GalleryChain::Finite(FiniteChain::from_dense(vec![
            vec![r(1, 2), r(1, 2), S::zero(), S::zero()],
            vec![r(1, 5), r(4, 5), S::zero(), S::zero()],
            vec![S::zero(), S::zero(), r(1, 2), r(1, 2)],
            vec![S::zero(), S::zero(), r(1, 5), r(4, 5)],
        ])?),
        "two-state" => {
            let a: S = parse("a", params[0])?;
            let b: S = parse("b", params[1])?;
            GalleryChain::Finite(FiniteChain::from_dense(vec![
                vec![S::one() - a.clone(), a],
                vec![b.clone(), S::one() - b],
            ])?)
        }
        "swap" => GalleryChain::Finite(FiniteChain::from_dense(vec![
            vec![S::zero(), S::one()],
            vec![S::one(), S::zero()],
        ])?),
        "identity" => {
            let k: usize = params[0]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("k: `{}` is not a count", params[0])))?;
            if k == 0 {
                return Err(Error::InvalidParameter("k must be at least 1".into()));
            }
            GalleryChain::Finite(FiniteChain::from_dense(
                (0..k)
                    .map(|i| (0..k).map(|j| if i == j { S::one() } else { S::zero() }).collect())
                    .collect(),
            )?)
        }
        _ => unreachable!("entry() accepted an unlisted name"),
    };
    Ok(chain)
}

/// Structural constraints for [`random_chain`], enforced by rejection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RandomChainOptions {
    pub irreducible: bool,
    pub aperiodic: bool,
}

const MAX_REJECTIONS: usize = 10_000;

/// Random chain whose rows are uniform on the simplex over a random support
/// of `ceil(sparsity · n_states)` states (at least 2 when constraints are
/// requested). Deterministic per seed.
pub fn random_chain(
    n_states: usize,
    sparsity: f64,
    seed: u64,
    opts: RandomChainOptions,
) -> Result<FiniteChain<f64>> {
    if n_states < 2 {
        return Err(Error::InvalidParameter("n_states must be at least 2".into()));
    }
    if !(sparsity > 0.0 && sparsity <= 1.0) {
        return Err(Error::InvalidParameter(format!("sparsity {sparsity} outside (0, 1]")));
    }
    let mut width = ((sparsity * n_states as f64).ceil() as usize).clamp(1, n_states);
    if opts.irreducible || opts.aperiodic {
        width = width.max(2);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let rows: Vec<Vec<(usize, f64)>> =
            (0..n_states).map(|_| random_row(&mut rng, n_states, width)).collect();
        let labels = (0..n_states).map(|i| i.to_string()).collect();
        let chain = FiniteChain::new(labels, rows)?;
        let s = structure(&chain);
        let ok = (!opts.irreducible || s.is_irreducible())
            && (!opts.aperiodic || s.classes.iter().filter(|c| c.recurrent).all(|c| c.period == Some(1)));
        if ok {
            return Ok(chain);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no chain met the constraints after {MAX_REJECTIONS} draws"
    )))
}

fn random_row<R: Rng>(rng: &mut R, n: usize, width: usize) -> Vec<(usize, f64)> {
    let mut targets = sample(rng, n, width).into_vec();
    targets.sort_unstable();
    let gammas: Vec<f64> = targets.iter().map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE)).collect();
    let total: f64 = gammas.iter().sum();
    targets.into_iter().zip(gammas).map(|(t, g)| (t, g / total)).collect()
}
