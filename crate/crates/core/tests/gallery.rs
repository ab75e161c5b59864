//! Every gallery fixture reproduces its recorded verdict.

use coupdoob::analysis::{verify_countable, verify_doob, Classification, VerifyOptions};
use coupdoob::chain::{invariant_measures, structure};
use coupdoob::gallery::{build, entries, random_chain, GalleryChain, RandomChainOptions};
use coupdoob::{BigRational, Scalar};
use num_traits::{One, Zero};

fn check_entry<S: Scalar>(name: &str, horizon: usize) {
    let entry = coupdoob::gallery::entry(name).unwrap();
    let expected = entry.expected;
    match build::<S>(name, &[]).unwrap() {
        GalleryChain::Finite(c) => {
            let opts = VerifyOptions { horizon, ..VerifyOptions::for_states(c.len()) };
            let v = verify_doob(&c, opts).unwrap();
            assert_eq!(v.classification, expected.classification, "{name}");
            assert_eq!(v.ipm_count, expected.ipm_count, "{name}");
            assert_eq!(v.conclusion_allx, expected.conclusion_allx, "{name}");
            assert_eq!(v.conclusion_mu_ae, expected.conclusion_mu_ae, "{name}");
        }
        GalleryChain::Countable(c) => {
            let opts = VerifyOptions { n_max: 20, horizon: 1000, threshold: 1e-8 };
            let v = verify_countable(&c, 3, opts).unwrap();
            assert_eq!(v.classification, expected.classification, "{name}");
            assert_eq!(usize::from(v.has_ipm), expected.ipm_count, "{name}");
            assert_eq!(v.conclusion_allx, expected.conclusion_allx, "{name}");
            assert_eq!(v.conclusion_mu_ae, expected.conclusion_mu_ae, "{name}");
        }
    }
}

#[test]
fn recorded_verdicts_hold_in_floating_point() {
    for e in entries() {
        check_entry::<f64>(e.name, 10_000);
    }
}

#[test]
fn recorded_verdicts_hold_exactly_for_finite_entries() {
    for e in entries().iter().filter(|e| !e.countable) {
        // Non-converging curves are followed to the horizon, and exact
        // denominators grow with every step.
        check_entry::<BigRational>(e.name, 200);
    }
}

#[test]
fn counterexample_has_point_mass_at_zero_as_its_ipm() {
    let c = build::<BigRational>("doob-counterexample", &[]).unwrap();
    let v = verify_countable(c.countable().unwrap(), 3, VerifyOptions { n_max: 5, horizon: 50, threshold: 1e-8 })
        .unwrap();
    assert!(v.has_ipm);
    assert!(v.ipm_head[0].is_one());
    assert!(v.ipm_head[1..].iter().all(Zero::is_zero));
    assert!(v.starts[0].converged_at == Some(0));
    assert!(v.starts[1..].iter().all(|s| s.converged_at.is_none()));
}

#[test]
fn swap_has_the_uniform_ipm_and_no_convergence() {
    let c = build::<BigRational>("swap", &[]).unwrap().finite().unwrap().clone();
    let ipms = invariant_measures(&c).unwrap();
    assert_eq!(ipms.len(), 1);
    let half = BigRational::new(1.into(), 2.into());
    assert_eq!(ipms[0].weights(), &[half.clone(), half][..]);
    let v = verify_doob(&c, VerifyOptions { n_max: 5, horizon: 100, threshold: 1e-8 }).unwrap();
    assert_eq!(v.classification, Classification::NoAssumptions);
    assert!(v.ipms[0].starts.iter().all(|s| s.converged_at.is_none() && s.last_distance.is_one()));
}

#[test]
fn parameters_override_defaults() {
    let c = build::<f64>("identity", &["3"]).unwrap().finite().unwrap().clone();
    assert_eq!(c.len(), 3);
    assert_eq!(invariant_measures(&c).unwrap().len(), 3);

    let c = build::<BigRational>("two-state", &["1/3", "1/4"]).unwrap().finite().unwrap().clone();
    assert_eq!(c.prob(0, 1), BigRational::new(1.into(), 3.into()));
    assert_eq!(c.prob(1, 0), BigRational::new(1.into(), 4.into()));
}

#[test]
fn constrained_random_chains_have_one_aperiodic_recurrent_class() {
    let opts = RandomChainOptions { irreducible: true, aperiodic: true };
    for seed in 0..50 {
        let c = random_chain(2 + seed as usize % 6, 0.3, seed, opts).unwrap();
        let s = structure(&c);
        assert!(s.is_irreducible(), "seed {seed}");
        let recurrent: Vec<_> = s.recurrent_classes().collect();
        assert_eq!(recurrent.len(), 1);
        assert_eq!(recurrent[0].period, Some(1));
        assert_eq!(c, random_chain(2 + seed as usize % 6, 0.3, seed, opts).unwrap());
    }
}
