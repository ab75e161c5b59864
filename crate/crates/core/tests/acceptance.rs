//! Acceptance criteria. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use coupdoob::analysis::{
    attempt_bound, evolve_coupled, recurrence_psi, verify_countable, verify_doob, Classification,
    CoupledStart, VerifyOptions,
};
use coupdoob::chain::{invariant_measures, Dist, FiniteChain};
use coupdoob::coupling::{maximal_coupling_row, residual_part, select_doeblin, split, CouplingKernel};
use coupdoob::gallery::{build, random_chain, RandomChainOptions};
use coupdoob::monte_carlo::{
    attempt_statistics, escape_bias_bound, estimate_hit_probability, replica_rng, Transitions,
};
use coupdoob::{BigRational, Chain, ExactChain};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 200 seeded chains with 2 to 8 states and mixed sparsity.
fn corpus() -> Vec<Chain> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    (0..200)
        .map(|i| {
            let n = 2 + i % 7;
            let sparsity = rng.random_range(0.25..=1.0);
            random_chain(n, sparsity, 1000 + i as u64, RandomChainOptions::default()).unwrap()
        })
        .collect()
}

/// `laws[x][n] = P_n(x, ·)` for `n ≤ n_max`, by repeated row products.
fn n_step_laws(c: &Chain, n_max: usize) -> Vec<Vec<Vec<f64>>> {
    let k = c.len();
    (0..k)
        .map(|x| {
            let mut cur = vec![0.0; k];
            cur[x] = 1.0;
            let mut out = vec![cur.clone()];
            for _ in 0..n_max {
                let mut next = vec![0.0; k];
                for (i, w) in cur.iter().enumerate() {
                    for (y, slot) in next.iter_mut().enumerate() {
                        *slot += w * c.prob(i, y);
                    }
                }
                out.push(next.clone());
                cur = next;
            }
            out
        })
        .collect()
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn criterion_1() -> Check {
    let mut pairs = 0;
    for (ci, c) in corpus().iter().enumerate() {
        let k = c.len();
        for x1 in 0..k {
            for x2 in 0..k {
                pairs += 1;
                let ctx = || format!("chain {ci}, pair ({x1},{x2})");
                let row = maximal_coupling_row(c, x1, x2).map_err(|e| format!("{}: {e}", ctx()))?;
                let p1: Vec<f64> = (0..k).map(|y| c.prob(x1, y)).collect();
                let p2: Vec<f64> = (0..k).map(|y| c.prob(x2, y)).collect();
                let m1 = row.first_marginal(k);
                let m2 = row.second_marginal(k);
                ensure(tv(m1.weights(), &p1) <= 1e-12 * k as f64, || format!("{}: first marginal", ctx()))?;
                for y in 0..k {
                    ensure((m1.weights()[y] - p1[y]).abs() <= 1e-12, || format!("{}: first marginal", ctx()))?;
                    ensure((m2.weights()[y] - p2[y]).abs() <= 1e-12, || format!("{}: second marginal", ctx()))?;
                }
                let diag_target = 1.0 - tv(&p1, &p2) / 2.0;
                ensure((row.diagonal_mass() - diag_target).abs() <= 1e-12, || {
                    format!("{}: diagonal {} vs {diag_target}", ctx(), row.diagonal_mass())
                })?;
                for ((a, b), w) in row.entries() {
                    if a != b && *w > 0.0 {
                        ensure(p1[*a] > 0.0 && p2[*b] > 0.0, || format!("{}: mass outside supports", ctx()))?;
                    }
                }
                let parts = split(c, x1, x2).map_err(|e| e.to_string())?;
                let residual_diag = residual_part(&parts).diagonal_mass();
                ensure(residual_diag == 0.0, || {
                    format!("{}: residual diagonal mass {residual_diag}", ctx())
                })?;
            }
        }
    }
    Ok(format!("200 chains, {pairs} ordered pairs"))
}

fn criterion_2() -> Check {
    const N: usize = 50;
    let (mut checked, mut hybrids, mut no_hybrid) = (0usize, 0usize, 0usize);
    let mut worst = f64::INFINITY;
    for (ci, c) in corpus().iter().enumerate() {
        let k = c.len();
        let laws = n_step_laws(c, N);
        let mut kernels = vec![CouplingKernel::maximal(c)];
        let mu = invariant_measures(c).map_err(|e| e.to_string())?.remove(0);
        match select_doeblin(c, &mu, VerifyOptions::for_states(k).n_max) {
            Ok(set) => {
                kernels.push(CouplingKernel::hybrid(c, set).map_err(|e| e.to_string())?);
                hybrids += 1;
            }
            Err(_) => no_hybrid += 1,
        }
        for kernel in &kernels {
            let step = kernel.step_len();
            for x1 in 0..k {
                for x2 in 0..k {
                    let a = evolve_coupled(kernel, &CoupledStart::Pair(x1, x2), N / step)
                        .map_err(|e| e.to_string())?;
                    for (m, tail) in a.uncoupled_tail.iter().enumerate() {
                        let n = m * step;
                        let d = tv(&laws[x1][n], &laws[x2][n]);
                        let slack = 2.0 * tail - d;
                        worst = worst.min(slack);
                        checked += 1;
                        ensure(slack >= -1e-12, || {
                            format!(
                                "chain {ci} {} kernel, pair ({x1},{x2}), n={n}: tv {d} > 2·{tail}",
                                kernel.kind().name()
                            )
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{checked} (pair, n) checks, {hybrids} hybrid kernels ({no_hybrid} chains without a Doeblin set), min slack {worst:.3e}"
    ))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD00B);
    let opts = RandomChainOptions { irreducible: true, aperiodic: true };
    let mut slowest = 0;
    for i in 0..50 {
        let n = 2 + i % 7;
        let sparsity = rng.random_range(0.2..=1.0);
        let c = random_chain(n, sparsity, 5000 + i as u64, opts).map_err(|e| e.to_string())?;
        let v = verify_doob(&c, VerifyOptions::for_states(n)).map_err(|e| e.to_string())?;
        ensure(v.thm1_holds && v.ipm_count == 1, || format!("chain {i}: assumptions/uniqueness"))?;
        ensure(v.curves_monotone, || format!("chain {i}: curve increased"))?;
        ensure(v.classification == Classification::Theorem1, || {
            format!("chain {i}: classified {}", v.classification)
        })?;
        for s in &v.ipms[0].starts {
            let at = s.converged_at.ok_or_else(|| format!("chain {i}, start {}: no convergence", s.state))?;
            slowest = slowest.max(at);
        }
    }
    Ok(format!("50 chains, all starts below 1e-8 by n={slowest}"))
}

fn chain_a() -> Chain {
    FiniteChain::from_dense(vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn criterion_4() -> Check {
    let a = chain_a();
    let mu = invariant_measures(&a).map_err(|e| e.to_string())?.remove(0);
    ensure(
        (mu.weights()[0] - 2.0 / 7.0).abs() < 1e-12 && (mu.weights()[1] - 5.0 / 7.0).abs() < 1e-12,
        || format!("ipm {:?}", mu.weights()),
    )?;
    let residual = a.invariance_residual(&mu).map_err(|e| e.to_string())?;
    ensure(residual < 1e-12, || format!("fixed-point residual {residual}"))?;
    let run = evolve_coupled(&CouplingKernel::maximal(&a), &CoupledStart::Pair(0, 1), 20)
        .map_err(|e| e.to_string())?;
    for n in 1..=20 {
        let tv_expected = 0.6 * 0.3f64.powi(n as i32 - 1);
        let tail_expected = 0.3f64.powi(n as i32);
        ensure((run.tv_curve[n] - tv_expected).abs() <= 1e-12, || format!("tv at n={n}"))?;
        ensure((run.first_meeting_tail[n] - tail_expected).abs() <= 1e-12, || format!("tail at n={n}"))?;
        ensure((run.uncoupled_tail[n] - tail_expected).abs() <= 1e-12, || format!("tail at n={n}"))?;
        ensure(run.bound_slack[n].abs() <= 1e-12, || format!("slack at n={n}"))?;
    }
    // The same quantities in exact arithmetic.
    let exact: ExactChain =
        FiniteChain::from_dense(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 5), q(4, 5)]]).unwrap();
    let mu = invariant_measures(&exact).map_err(|e| e.to_string())?.remove(0);
    ensure(mu.weights() == [q(2, 7), q(5, 7)], || "exact ipm".into())?;
    let run = evolve_coupled(&CouplingKernel::maximal(&exact), &CoupledStart::Pair(0, 1), 20)
        .map_err(|e| e.to_string())?;
    let mut power = BigRational::one();
    for n in 1..=20 {
        ensure(run.tv_curve[n] == q(6, 10) * power.clone(), || format!("exact tv at n={n}"))?;
        power *= q(3, 10);
        ensure(run.first_meeting_tail[n] == power, || format!("exact tail at n={n}"))?;
        ensure(run.bound_slack[n].is_zero(), || format!("exact slack at n={n}"))?;
    }
    Ok("ipm (2/7, 5/7), tv 0.6·0.3^(n-1), tail 0.3^n, slack 0 for n ≤ 20 (f64 and exact)".into())
}

fn criterion_5() -> Check {
    let c = build::<f64>("doob-counterexample", &[]).map_err(|e| e.to_string())?;
    let c = c.countable().unwrap();
    let mut parts = Vec::new();
    for i in 1u64..=3 {
        let oracle = 0.5f64.powi(i as i32);
        let est = estimate_hit_probability(c, i, 0, 2000, 100_000, 0x5EED + i);
        ensure((est.point - oracle).abs() <= 0.01, || format!("x0={i}: hit {} vs {oracle}", est.point))?;
        let bias = escape_bias_bound(2.0 / 3.0, 1.0 / 3.0, i, 2000);
        let lower = 2.0 * (1.0 - (est.point + 3.0 * est.stderr + bias).min(1.0));
        let need = 2.0 * (1.0 - oracle) - 0.04;
        ensure(lower >= need, || format!("x0={i}: limit lower bound {lower} < {need}"))?;
        parts.push(format!("x0={i}: hit {:.4} ± {:.4}, lim tv ≥ {lower:.4}", est.point, est.stderr));
    }
    Ok(parts.join("; "))
}

fn criterion_6() -> Check {
    let c = build::<f64>("disconnected-two-classes", &[]).map_err(|e| e.to_string())?;
    let c = c.finite().unwrap();
    let v = verify_doob(c, VerifyOptions::for_states(c.len())).map_err(|e| e.to_string())?;
    ensure(v.ipm_count == 2, || format!("ipm_count {}", v.ipm_count))?;
    ensure(v.ipms.iter().all(|m| m.thm2_assumption && m.conclusion_mu_ae), || "per-ipm check".into())?;
    ensure(!v.thm1_holds && !v.cor1_holds, || "global assumptions should fail".into())?;
    ensure(v.classification == Classification::Theorem2PerIpm, || format!("classified {}", v.classification))?;
    let exact = build::<BigRational>("disconnected-two-classes", &[]).map_err(|e| e.to_string())?;
    let ipms = invariant_measures(exact.finite().unwrap()).map_err(|e| e.to_string())?;
    let zero = BigRational::zero();
    ensure(
        ipms.len() == 2
            && ipms[0].weights() == [q(2, 7), q(5, 7), zero.clone(), zero.clone()]
            && ipms[1].weights() == [zero.clone(), zero, q(2, 7), q(5, 7)],
        || "exact extreme ipms".into(),
    )?;
    Ok("two extreme ipms (2/7, 5/7) per block, each satisfying the per-support assumption; not unique".into())
}

fn criterion_7() -> Check {
    let r3 = build::<f64>("remark3-drift-down", &[]).map_err(|e| e.to_string())?;
    let r3 = r3.countable().unwrap();
    let small = VerifyOptions { n_max: 1, horizon: 1000, threshold: 1e-8 };
    let v = verify_countable(r3, 3, small).map_err(|e| e.to_string())?;
    let mut failing = Vec::new();
    for (x, row) in v.cor1_assumption.iter().enumerate() {
        for (y, w) in row.iter().enumerate() {
            if w.is_none() {
                failing.push((x, y));
            }
        }
    }
    ensure(!failing.is_empty(), || "no pair fails at n_max=1".into())?;
    ensure(failing.iter().all(|(x, y)| (x + y) % 2 == 1), || format!("failing pairs {failing:?}"))?;
    ensure(v.conclusion_allx, || format!("remark3 starts did not converge: {:?}", v.starts))?;
    let wide = verify_countable(r3, 3, VerifyOptions { n_max: 20, horizon: 1000, threshold: 1e-8 })
        .map_err(|e| e.to_string())?;
    ensure(
        (0..4).all(|x| (0..4).all(|y| (x == y) == wide.thm1_assumption[x][y].is_some())),
        || "equivalence should fail exactly off the diagonal".into(),
    )?;
    ensure(wide.cor1_holds && wide.conclusion_allx, || "remark3 at n_max=20".into())?;

    let swap = build::<BigRational>("swap", &[]).map_err(|e| e.to_string())?;
    let swap = swap.finite().unwrap();
    let v = verify_doob(swap, VerifyOptions { n_max: 5, horizon: 200, threshold: 1e-8 })
        .map_err(|e| e.to_string())?;
    ensure(v.ipm_count == 1 && v.ipms[0].measure.weights() == [q(1, 2), q(1, 2)], || "swap ipm".into())?;
    ensure(!v.thm1_holds && !v.cor1_holds && !v.thm2_holds, || "swap assumptions".into())?;
    ensure(v.classification == Classification::NoAssumptions, || format!("swap classified {}", v.classification))?;
    let mu = Dist::new(vec![q(1, 2), q(1, 2)]).unwrap();
    for x in 0..2 {
        let curve = swap.convergence_curve(x, &mu, 200).map_err(|e| e.to_string())?;
        ensure(curve.iter().all(|d| d.is_one()), || format!("swap curve from {x}"))?;
    }
    Ok(format!(
        "remark3: non-singularity fails at n_max=1 for {failing:?}, all starts converge; swap: unique ipm, tv ≡ 1, no assumption holds"
    ))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA77E);
    for _ in 0..1000 {
        let den: i64 = rng.random_range(1..=1000);
        let p = q(rng.random_range(0..=den), den);
        let k = rng.random_range(0..=60usize);
        let mut iterated = BigRational::zero();
        for _ in 0..k {
            iterated = p.clone() * (BigRational::one() - iterated.clone()) + iterated;
        }
        ensure(attempt_bound(&p, k) == iterated, || format!("p={p}, k={k}"))?;
    }

    let mut fixtures = vec![chain_a()];
    let opts = RandomChainOptions { irreducible: true, aperiodic: true };
    for i in 0..10u64 {
        fixtures.push(random_chain(3 + (i as usize % 3), 0.6, 8000 + i, opts).map_err(|e| e.to_string())?);
    }
    let mut checks = 0;
    let mut min_margin = f64::INFINITY;
    for (fi, c) in fixtures.iter().enumerate() {
        let mu = invariant_measures(c).map_err(|e| e.to_string())?.remove(0);
        let set = select_doeblin(c, &mu, VerifyOptions::for_states(c.len()).n_max).map_err(|e| e.to_string())?;
        let Some(z0) = set.members().find(|(a, b)| a != b) else { continue };
        let kernel = CouplingKernel::hybrid(c, set.clone()).map_err(|e| e.to_string())?;
        let stats = attempt_statistics(&kernel, &set, z0, 5, 20_000, 100, 0xB0 + fi as u64);
        for (k, (e, b)) in stats.p_hat.iter().zip(&stats.bounds).enumerate() {
            checks += 1;
            min_margin = min_margin.min(e.point - b + 3.0 * e.stderr);
            ensure(e.point >= b - 3.0 * e.stderr, || {
                format!("fixture {fi}, k={}: p̂ {} < {b} − 3·{}", k + 1, e.point, e.stderr)
            })?;
        }
    }
    Ok(format!("1000 exact recursion checks; {checks} attempt-bound checks, min margin {min_margin:.2e}"))
}

/// Fraction of replicas visiting `b` (states `< b`) during `[steps/2, steps]`.
fn late_visit_frequency(c: &Chain, x0: usize, b: usize, steps: usize, replicas: u64, seed: u64) -> f64 {
    let mut hits = 0u64;
    for r in 0..replicas {
        let mut g = replica_rng(seed, r);
        let mut x = x0;
        for step in 1..=steps {
            x = c.sample_next(x, &mut g);
            if step >= steps / 2 && x < b {
                hits += 1;
                break;
            }
        }
    }
    hits as f64 / replicas as f64
}

fn criterion_9() -> Check {
    const REPLICAS: u64 = 10_000;
    const FIRST_STEPS: usize = 1000;
    const MAX_STEPS: usize = 16_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9);
    let (mut nontrivial, mut longest) = (0, FIRST_STEPS);
    let se_of = |p: f64| (p * (1.0 - p) / (REPLICAS - 1) as f64).sqrt();
    for i in 0..100u64 {
        let n = 2 + (i as usize) % 7;
        let sparsity = rng.random_range(0.2..=0.6);
        let c = random_chain(n, sparsity, 9000 + i, RandomChainOptions::default()).map_err(|e| e.to_string())?;
        let target: Vec<usize> = (0..n.div_ceil(2)).collect();
        let report = recurrence_psi(&c, &target).map_err(|e| e.to_string())?;
        ensure(report.harmonic_residual < 1e-12, || format!("chain {i}: residual {}", report.harmonic_residual))?;
        let x0 = n - 1;
        let psi = report.psi[x0];
        // The brute-force horizon doubles until successive estimates agree
        // within one standard error; it never looks at ψ.
        let mut steps = FIRST_STEPS;
        let mut p = late_visit_frequency(&c, x0, target.len(), steps, REPLICAS, 0x5151 + i);
        while steps < MAX_STEPS {
            let next = late_visit_frequency(&c, x0, target.len(), 2 * steps, REPLICAS, 0x5151 + i);
            steps *= 2;
            let settled = (next - p).abs() <= se_of(next).max(se_of(p));
            p = next;
            if settled {
                break;
            }
        }
        longest = longest.max(steps);
        let se = se_of(p).max((psi * (1.0 - psi) / REPLICAS as f64).sqrt());
        if psi > 0.0 && psi < 1.0 {
            nontrivial += 1;
        }
        ensure((p - psi).abs() <= 3.0 * se, || format!("chain {i}: ψ {psi} vs MC {p} ± {se} ({steps} steps)"))?;
    }
    Ok(format!(
        "100 chains, B = first half of the states ({nontrivial} with 0 < ψ < 1), longest run {longest} steps, harmonic residual < 1e-12"
    ))
}

fn run_cli(args: &[&str], threads: Option<&str>) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coupdoob"));
    cmd.args(args).arg("--out").arg(&out);
    match threads {
        Some(t) => cmd.env("COUPDOOB_THREADS", t),
        None => cmd.env_remove("COUPDOOB_THREADS"),
    };
    let status = cmd.status().map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("{args:?} exited with {status}"))?;
    std::fs::read(&out).map_err(|e| e.to_string())
}

fn criterion_10() -> Check {
    let commands: [&[&str]; 7] = [
        &["verify", "--gallery", "two-state:0.5,0.2", "--format", "json"],
        &["verify", "--gallery", "remark3-drift-down", "--format", "csv"],
        &["curve", "--gallery", "two-state", "--kernel", "hybrid", "--format", "csv"],
        &["simulate", "--gallery", "doob-counterexample", "--start", "3", "--replicas", "2000", "--horizon", "500", "--seed", "7", "--format", "json"],
        &["simulate", "--gallery", "two-state", "--replicas", "3000", "--horizon", "30", "--seed", "11", "--format", "csv"],
        &["gallery", "list", "--format", "json"],
        &["gallery", "show", "disconnected-two-classes"],
    ];
    for args in commands {
        let first = run_cli(args, None)?;
        let second = run_cli(args, None)?;
        ensure(!first.is_empty() && first == second, || format!("{args:?}: outputs differ"))?;
        if args[0] == "simulate" {
            let single = run_cli(args, Some("1"))?;
            let many = run_cli(args, Some("4"))?;
            ensure(single == first && many == first, || format!("{args:?}: thread count changed output"))?;
        }
    }
    Ok(format!("{} commands byte-identical across reruns and thread counts", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("maximal-coupling suite", criterion_1),
        ("coupling inequality", criterion_2),
        ("convergence on irreducible aperiodic chains", criterion_3),
        ("two-state closed forms", criterion_4),
        ("countable counterexample", criterion_5),
        ("disconnected classes", criterion_6),
        ("drift-down and swap necessity pair", criterion_7),
        ("attempt recursion bound", criterion_8),
        ("recurrence oracle", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
