use serde_json::{json, Value};

use crate::analysis::{
    evolve_coupled, verify_countable, verify_doob, CoupledStart, CountableVerdict, DoobVerdict,
    StartConvergence, VerifyOptions,
};
use crate::chain::{invariant_measures, CountableChain, FiniteChain};
use crate::chainfile::parse_chain;
use crate::coupling::{select_doeblin, CouplingKernel};
use crate::gallery::{build, entries, entry, GalleryChain};
use crate::monte_carlo::{
    escape_bias_bound, estimate_coupling_tail, estimate_hit_probability, HybridRule, McEstimate,
    Transitions,
};
use crate::scalar::Scalar;
use crate::{BigRational, Error};

use super::output::{num, opt_num, Report};
use super::{ChainSource, CommandKind, InputError, KernelChoice, Outcome, RunConfig};

const COUNTABLE_N_MAX: usize = 20;
const COUNTABLE_HORIZON: usize = 1000;
const CURVE_HORIZON: usize = 50;
const SIMULATE_HORIZON: usize = 2000;

pub(super) fn execute(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let report = match cfg.command {
        CommandKind::Verify => return verify(cfg),
        CommandKind::Curve => curve(cfg)?,
        CommandKind::Simulate => simulate(cfg)?,
        CommandKind::GalleryList => gallery_list(),
        CommandKind::GalleryShow => gallery_show(cfg)?,
    };
    Ok(Outcome { report, mismatch: None })
}

fn load<S: Scalar>(source: &ChainSource) -> Result<GalleryChain<S>, InputError> {
    match source {
        ChainSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
            parse_chain(&text).map_err(|e| InputError(format!("{}:{e}", path.display())))
        }
        ChainSource::Gallery { name, params } => {
            let params: Vec<&str> = params.iter().map(String::as_str).collect();
            Ok(build(name, &params)?)
        }
    }
}

fn source_of(cfg: &RunConfig) -> &ChainSource {
    cfg.source.as_ref().expect("chain commands always carry a source")
}

fn holds(b: bool) -> String {
    if b { "holds" } else { "fails" }.to_string()
}

/// First pair without a witness, for the report.
fn first_failure(matrix: &[Vec<Option<usize>>]) -> Option<(usize, usize)> {
    matrix.iter().enumerate().find_map(|(x, row)| row.iter().position(Option::is_none).map(|y| (x, y)))
}

fn assumption_text(matrix: &[Vec<Option<usize>>], labels: &dyn Fn(usize) -> String) -> String {
    match first_failure(matrix) {
        None => {
            let worst = matrix.iter().flatten().flatten().max().copied().unwrap_or(0);
            format!("holds (all pairs by n={worst})")
        }
        Some((x, y)) => format!("fails (first at ({},{}))", labels(x), labels(y)),
    }
}

fn matrix_json(m: &[Vec<Option<usize>>]) -> Value {
    json!(m)
}

fn start_text(s: &StartConvergence<f64>) -> String {
    match s.converged_at {
        Some(n) => format!("converged at n={n} (tv {})", num(s.last_distance)),
        None => format!("not converged (tv {})", num(s.last_distance)),
    }
}

fn start_json(s: &StartConvergence<f64>, label: &str) -> Value {
    json!({
        "state": label,
        "converged_at": s.converged_at,
        "last_distance": s.last_distance,
        "monotone": s.monotone,
    })
}

fn verify(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let source = source_of(cfg);
    let report = match load::<f64>(source)? {
        GalleryChain::Finite(chain) => {
            let mut opts = VerifyOptions::for_states(chain.len());
            opts.n_max = cfg.n_max.unwrap_or(opts.n_max);
            opts.horizon = cfg.horizon.unwrap_or(opts.horizon);
            opts.threshold = cfg.threshold;
            let v = verify_doob(&chain, opts)?;
            finite_verdict_report(source, &chain, &v)
        }
        GalleryChain::Countable(chain) => {
            let opts = VerifyOptions {
                n_max: cfg.n_max.unwrap_or(COUNTABLE_N_MAX),
                horizon: cfg.horizon.unwrap_or(COUNTABLE_HORIZON),
                threshold: cfg.threshold,
            };
            let v = verify_countable(&chain, cfg.max_start, opts)?;
            countable_verdict_report(source, &v)
        }
    };
    let (report, classification) = report;
    let mismatch = match cfg.expect {
        Some(want) if want != classification => {
            Some(format!("expected classification {want}, got {classification}"))
        }
        _ => None,
    };
    Ok(Outcome { report, mismatch })
}

fn finite_verdict_report(
    source: &ChainSource,
    chain: &FiniteChain<f64>,
    v: &DoobVerdict<f64>,
) -> (Report, crate::analysis::Classification) {
    let label = |i: usize| chain.label(i).to_string();
    let mut fields: Vec<(String, String)> = vec![
        ("chain".into(), source.describe()),
        ("states".into(), chain.len().to_string()),
        ("n_max".into(), v.options.n_max.to_string()),
        ("horizon".into(), v.options.horizon.to_string()),
        ("threshold".into(), num(v.options.threshold)),
        ("classification".into(), v.classification.label().into()),
        ("summary".into(), v.classification.summary().into()),
        ("ipm_count".into(), v.ipm_count.to_string()),
        ("thm1_assumption".into(), assumption_text(&v.thm1_assumption, &label)),
        ("cor1_assumption".into(), assumption_text(&v.cor1_assumption, &label)),
        ("thm2_assumption".into(), holds(v.thm2_holds)),
        ("conclusion_allx".into(), v.conclusion_allx.to_string()),
        ("conclusion_mu_ae".into(), v.conclusion_mu_ae.to_string()),
        ("curves_monotone".into(), v.curves_monotone.to_string()),
    ];
    let mut ipms = Vec::new();
    for (i, ipm) in v.ipms.iter().enumerate() {
        let weights: Vec<String> = ipm.measure.weights().iter().map(|w| num(*w)).collect();
        let support: Vec<String> = ipm.support.iter().map(|&s| label(s)).collect();
        fields.push((format!("ipm[{i}]"), weights.join(" ")));
        fields.push((format!("ipm[{i}].support"), support.join(" ")));
        fields.push((format!("ipm[{i}].thm2_assumption"), holds(ipm.thm2_assumption)));
        for s in &ipm.starts {
            fields.push((format!("ipm[{i}].start[{}]", label(s.state)), start_text(s)));
        }
        ipms.push(json!({
            "weights": ipm.measure.weights(),
            "support": support,
            "thm2_assumption": ipm.thm2_assumption,
            "conclusion_mu_ae": ipm.conclusion_mu_ae,
            "starts": ipm.starts.iter().map(|s| start_json(s, &label(s.state))).collect::<Vec<_>>(),
        }));
    }
    let json = json!({
        "chain": source.describe(),
        "states": chain.labels(),
        "n_max": v.options.n_max,
        "horizon": v.options.horizon,
        "threshold": v.options.threshold,
        "classification": v.classification.label(),
        "summary": v.classification.summary(),
        "ipm_count": v.ipm_count,
        "thm1_holds": v.thm1_holds,
        "cor1_holds": v.cor1_holds,
        "thm2_holds": v.thm2_holds,
        "thm1_assumption": matrix_json(&v.thm1_assumption),
        "cor1_assumption": matrix_json(&v.cor1_assumption),
        "conclusion_allx": v.conclusion_allx,
        "conclusion_mu_ae": v.conclusion_mu_ae,
        "curves_monotone": v.curves_monotone,
        "ipms": ipms,
    });
    (Report::Record { fields, json }, v.classification)
}

fn countable_verdict_report(
    source: &ChainSource,
    v: &CountableVerdict<f64>,
) -> (Report, crate::analysis::Classification) {
    let label = |i: usize| i.to_string();
    let mut fields: Vec<(String, String)> = vec![
        ("chain".into(), source.describe()),
        ("states".into(), "countable".into()),
        ("starts".into(), format!("0..={}", v.max_start)),
        ("n_max".into(), v.options.n_max.to_string()),
        ("horizon".into(), v.options.horizon.to_string()),
        ("threshold".into(), num(v.options.threshold)),
        ("classification".into(), v.classification.label().into()),
        ("summary".into(), v.classification.summary().into()),
        ("has_ipm".into(), v.has_ipm.to_string()),
        ("thm1_assumption".into(), assumption_text(&v.thm1_assumption, &label)),
        ("cor1_assumption".into(), assumption_text(&v.cor1_assumption, &label)),
        ("conclusion_allx".into(), v.conclusion_allx.to_string()),
        ("conclusion_mu_ae".into(), v.conclusion_mu_ae.to_string()),
    ];
    if v.has_ipm {
        let head: Vec<String> = v.ipm_head.iter().map(|w| num(*w)).collect();
        fields.push(("ipm_head".into(), head.join(" ")));
    }
    for s in &v.starts {
        fields.push((format!("start[{}]", s.state), start_text(s)));
    }
    let json = json!({
        "chain": source.describe(),
        "max_start": v.max_start,
        "n_max": v.options.n_max,
        "horizon": v.options.horizon,
        "threshold": v.options.threshold,
        "classification": v.classification.label(),
        "summary": v.classification.summary(),
        "has_ipm": v.has_ipm,
        "ipm_head": v.ipm_head,
        "thm1_holds": v.thm1_holds,
        "cor1_holds": v.cor1_holds,
        "thm1_assumption": matrix_json(&v.thm1_assumption),
        "cor1_assumption": matrix_json(&v.cor1_assumption),
        "conclusion_allx": v.conclusion_allx,
        "conclusion_mu_ae": v.conclusion_mu_ae,
        "starts": v.starts.iter().map(|s| start_json(s, &label(s.state))).collect::<Vec<_>>(),
    });
    (Report::Record { fields, json }, v.classification)
}

fn rows_json(header: &[String], rows: &[Vec<String>], extra: Value) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let obj: serde_json::Map<String, Value> = header
                .iter()
                .zip(r)
                .map(|(h, c)| {
                    let v = if c.is_empty() {
                        Value::Null
                    } else {
                        // Floats are always rendered with a `.` or exponent, so
                        // plain digits are counts and indices.
                        c.parse::<u64>()
                            .map(|x| json!(x))
                            .or_else(|_| c.parse::<f64>().map(|x| json!(x)))
                            .unwrap_or_else(|_| json!(c))
                    };
                    (h.clone(), v)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut out = extra;
    out["rows"] = Value::Array(rows);
    out
}

fn curve(cfg: &RunConfig) -> Result<Report, InputError> {
    let source = source_of(cfg);
    let chain = match load::<f64>(source)? {
        GalleryChain::Finite(c) => c,
        GalleryChain::Countable(_) => {
            return Err(InputError(
                "curve needs a finite chain; use `simulate` for countable chains".into(),
            ))
        }
    };
    let horizon = cfg.horizon.unwrap_or(CURVE_HORIZON);
    let measures = invariant_measures(&chain)?;
    let mu = measures.get(cfg.ipm).ok_or_else(|| {
        InputError(format!("--ipm {} out of range: the chain has {} extreme invariant law(s)", cfg.ipm, measures.len()))
    })?;
    let (a, b) = match &cfg.pair {
        Some((a, b)) => (chain.index_of(a)?, chain.index_of(b)?),
        None if chain.len() >= 2 => (0, 1),
        None => (0, 0),
    };
    let kernel = match cfg.kernel {
        KernelChoice::Maximal => CouplingKernel::maximal(&chain),
        KernelChoice::Independent => CouplingKernel::independent(&chain),
        KernelChoice::Hybrid => {
            let n_max = cfg.n_max.unwrap_or(VerifyOptions::for_states(chain.len()).n_max);
            let set = select_doeblin(&chain, mu, n_max)?;
            CouplingKernel::hybrid(&chain, set)?
        }
    };
    let coupled = match evolve_coupled(&kernel, &CoupledStart::Pair(a, b), horizon / kernel.step_len()) {
        Err(Error::ExactCapExceeded { pairs, cap }) => {
            return Err(InputError(format!(
                "product space has {pairs} pairs, above the exact cap of {cap}; use `simulate`"
            )))
        }
        r => r?,
    };
    let curves = (0..chain.len())
        .map(|x| chain.convergence_curve(x, mu, horizon))
        .collect::<crate::Result<Vec<_>>>()?;

    let mut header = vec!["n".to_string()];
    header.extend(chain.labels().iter().map(|l| format!("tv_mu[{l}]")));
    header.extend(
        ["tv_pair", "uncoupled_tail", "first_meeting_tail", "bound_slack"].map(String::from),
    );
    let step = kernel.step_len();
    let rows: Vec<Vec<String>> = (0..=horizon)
        .map(|n| {
            let mut row = vec![n.to_string()];
            row.extend(curves.iter().map(|c| num(c[n])));
            let k = (n % step == 0).then_some(n / step);
            let at = |v: &Vec<f64>| opt_num(k.map(|k| v[k]));
            row.extend([
                at(&coupled.tv_curve),
                at(&coupled.uncoupled_tail),
                at(&coupled.first_meeting_tail),
                at(&coupled.bound_slack),
            ]);
            row
        })
        .collect();
    let json = rows_json(
        &header,
        &rows,
        json!({
            "chain": source.describe(),
            "ipm": mu.weights(),
            "pair": [chain.label(a), chain.label(b)],
            "kernel": kernel.kind().name(),
            "step_len": step,
        }),
    );
    Ok(Report::Rows { header, rows, json })
}

fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut scale = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let n = m * scale;
            if n >= horizon {
                break 'outer;
            }
            out.push(n);
        }
        scale *= 10;
    }
    if horizon > 0 {
        out.push(horizon);
    }
    out
}

struct SimRows {
    rows: Vec<Vec<String>>,
}

impl SimRows {
    fn push(&mut self, quantity: &str, n: usize, e: &McEstimate) {
        self.rows.push(vec![
            quantity.into(),
            n.to_string(),
            num(e.point),
            num(e.stderr),
            e.n_samples.to_string(),
        ]);
    }

    fn push_bound(&mut self, quantity: &str, n: usize, value: f64) {
        self.rows.push(vec![quantity.into(), n.to_string(), num(value), String::new(), String::new()]);
    }
}

fn simulate_on<C: Transitions>(
    chain: &C,
    x0: C::State,
    target: C::State,
    cfg: &RunConfig,
    bias: Option<f64>,
    absorbing: bool,
    out: &mut SimRows,
) {
    let horizon = cfg.horizon.unwrap_or(SIMULATE_HORIZON);
    let hit = estimate_hit_probability(chain, x0, target, horizon, cfg.replicas, cfg.seed);
    out.push("hit_probability", horizon, &hit);
    if let Some(bias) = bias {
        out.push_bound("hit_bias_bound", horizon, bias);
        if absorbing {
            // ‖P_n(x,·) − δ_t‖ = 2(1 − P(X_n = t)) and P(X_n = t) rises to the
            // hitting probability, bounded above by the estimate plus slack.
            let h_upper = (hit.point + 3.0 * hit.stderr + bias).min(1.0);
            out.push_bound("limit_tv_lower_bound", horizon, 2.0 * (1.0 - h_upper));
        }
    }
    let rule = HybridRule::maximal(chain);
    let tail = estimate_coupling_tail(&rule, (x0, target), horizon, cfg.replicas, cfg.seed);
    for n in checkpoints(horizon) {
        out.push("first_meeting_tail", n, &tail.first_meeting[n]);
    }
    for n in checkpoints(horizon) {
        out.push("uncoupled_tail", n, &tail.uncoupled[n]);
    }
}

fn parse_count_state(s: &str) -> Result<u64, InputError> {
    s.trim().parse().map_err(|_| InputError(format!("`{s}` is not a state of a countable chain")))
}

/// Bound on the hitting mass missed by the horizon, available for
/// birth-death walks drifting away from a target below the start.
fn birth_death_bias(chain: &CountableChain<f64>, x0: u64, target: u64, horizon: usize) -> Option<f64> {
    match chain {
        _ if x0 == target => Some(0.0),
        CountableChain::BirthDeath(bd) if x0 > target && bd.up > bd.down => {
            Some(escape_bias_bound(bd.up, bd.down, x0 - target, horizon))
        }
        _ => None,
    }
}

fn simulate(cfg: &RunConfig) -> Result<Report, InputError> {
    let source = source_of(cfg);
    let mut out = SimRows { rows: Vec::new() };
    let (start_label, target_label) = match load::<f64>(source)? {
        GalleryChain::Finite(chain) => {
            let x0 = match &cfg.start {
                Some(s) => chain.index_of(s)?,
                None => 1.min(chain.len() - 1),
            };
            let target = match &cfg.target {
                Some(t) => chain.index_of(t)?,
                None => 0,
            };
            simulate_on(&chain, x0, target, cfg, None, false, &mut out);
            (chain.label(x0).to_string(), chain.label(target).to_string())
        }
        GalleryChain::Countable(chain) => {
            let x0 = cfg.start.as_deref().map(parse_count_state).transpose()?.unwrap_or(1);
            let target = cfg.target.as_deref().map(parse_count_state).transpose()?.unwrap_or(0);
            let horizon = cfg.horizon.unwrap_or(SIMULATE_HORIZON);
            let bias = birth_death_bias(&chain, x0, target, horizon);
            let absorbing = chain.row(target).iter().all(|(y, _)| *y == target);
            simulate_on(&chain, x0, target, cfg, bias, absorbing, &mut out);
            (x0.to_string(), target.to_string())
        }
    };
    let header: Vec<String> =
        ["quantity", "n", "point", "stderr", "n_samples"].map(String::from).to_vec();
    let json = rows_json(
        &header,
        &out.rows,
        json!({
            "chain": source.describe(),
            "start": start_label,
            "target": target_label,
            "horizon": cfg.horizon.unwrap_or(SIMULATE_HORIZON),
            "replicas": cfg.replicas,
            "seed": cfg.seed,
        }),
    );
    Ok(Report::Rows { header, rows: out.rows, json })
}

fn gallery_list() -> Report {
    let header: Vec<String> =
        ["name", "kind", "params", "expected", "ipm_count", "description"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = entries()
        .iter()
        .map(|e| {
            let params: Vec<String> =
                e.param_names.iter().zip(e.default_params).map(|(n, v)| format!("{n}={v}")).collect();
            vec![
                e.name.to_string(),
                if e.countable { "countable" } else { "finite" }.to_string(),
                params.join(","),
                e.expected.classification.label().to_string(),
                e.expected.ipm_count.to_string(),
                e.description.to_string(),
            ]
        })
        .collect();
    let json = json!({
        "entries": entries().iter().map(|e| json!({
            "name": e.name,
            "kind": if e.countable { "countable" } else { "finite" },
            "param_names": e.param_names,
            "default_params": e.default_params,
            "description": e.description,
            "expected": {
                "classification": e.expected.classification.label(),
                "ipm_count": e.expected.ipm_count,
                "conclusion_allx": e.expected.conclusion_allx,
                "conclusion_mu_ae": e.expected.conclusion_mu_ae,
            },
        })).collect::<Vec<_>>(),
    });
    Report::Rows { header, rows, json }
}

const COUNTABLE_SHOWN: u64 = 5;

fn gallery_show(cfg: &RunConfig) -> Result<Report, InputError> {
    let ChainSource::Gallery { name, params } = source_of(cfg) else {
        unreachable!("gallery show always names a fixture")
    };
    let e = entry(name)?;
    let refs: Vec<&str> = params.iter().map(String::as_str).collect();
    let chain = build::<BigRational>(name, &refs)?;
    let used: Vec<String> = if params.is_empty() {
        e.default_params.iter().map(|s| s.to_string()).collect()
    } else {
        params.clone()
    };
    let defaults = used.iter().map(String::as_str).eq(e.default_params.iter().copied());
    let mut fields: Vec<(String, String)> = vec![
        ("name".into(), e.name.into()),
        ("kind".into(), if e.countable { "countable" } else { "finite" }.into()),
        (
            "params".into(),
            e.param_names.iter().zip(&used).map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(","),
        ),
        ("description".into(), e.description.into()),
    ];
    let rows_json = match &chain {
        GalleryChain::Finite(c) => {
            let mut rows = Vec::new();
            for x in 0..c.len() {
                let dense: Vec<String> = (0..c.len()).map(|y| c.prob(x, y).to_string()).collect();
                fields.push((format!("row {}", c.label(x)), format!("({})", dense.join(","))));
                rows.push(dense);
            }
            json!({ "states": c.labels(), "rows": rows })
        }
        GalleryChain::Countable(c) => {
            let mut rows = serde_json::Map::new();
            for x in 0..COUNTABLE_SHOWN {
                let row = c.row(x);
                let text: Vec<String> = row.iter().map(|(y, p)| format!("{y}:{p}")).collect();
                fields.push((format!("row {x}"), format!("({})", text.join(","))));
                rows.insert(
                    x.to_string(),
                    Value::Object(row.iter().map(|(y, p)| (y.to_string(), json!(p.to_string()))).collect()),
                );
            }
            fields.push(("rows beyond".into(), format!("same pattern as row {}", COUNTABLE_SHOWN - 1)));
            json!({ "rows": rows })
        }
    };
    let mut json = json!({
        "name": e.name,
        "kind": if e.countable { "countable" } else { "finite" },
        "params": used,
        "description": e.description,
        "chain": rows_json,
    });
    if defaults {
        fields.push(("expected".into(), e.expected.classification.label().into()));
        fields.push(("expected_ipm_count".into(), e.expected.ipm_count.to_string()));
        json["expected"] = json!({
            "classification": e.expected.classification.label(),
            "ipm_count": e.expected.ipm_count,
            "conclusion_allx": e.expected.conclusion_allx,
            "conclusion_mu_ae": e.expected.conclusion_mu_ae,
        });
    }
    Ok(Report::Record { fields, json })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(2000), vec![0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000]);
        assert_eq!(checkpoints(5), vec![0, 1, 2, 5]);
        assert_eq!(checkpoints(1), vec![0, 1]);
    }
}
