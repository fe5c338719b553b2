//! One function per subcommand, each returning a report and an optional
//! domain failure that turns into exit code 1.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Map, Value};
use toric_crn::balancing::{detailed_balancing_exact, detailed_balancing_float, CircuitViolation};
use toric_crn::birch::{birch_point, BirchConfig};
use toric_crn::cayley::{
    cayley_matrix, integer_kernel_basis, moduli_membership_exact, moduli_membership_float, MembershipDecision,
};
use toric_crn::corpus::run_corpus;
use toric_crn::dynamics::{simulate, IntegratorConfig, Method, Simulation};
use toric_crn::strata::{analyze_strata, FarkasOutcome};
use toric_crn::tree::{monomial_counts, tree_constants_minor};
use toric_crn::ReactionNetwork;

use crate::input::{load_network, parse_face, parse_vector, resolve_rates};
use crate::report::{csv_string, Output, Table};
use crate::CliError;

pub struct Outcome {
    pub output: Output,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Self { output, failure: None }
    }
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(T::to_string).collect()
}

fn exact_or_float<T: ToString>(exact: bool, v: &T, x: f64) -> Value {
    if exact {
        Value::String(v.to_string())
    } else {
        json!(x)
    }
}

pub fn analyze(network: &str) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let cayley = cayley_matrix(net);
    let mut v = serde_json::to_value(net.structural_report())?;
    let map = v.as_object_mut().expect("report is an object");
    map.insert("reversible".into(), json!(net.is_reversible()));
    map.insert("cayley_rank".into(), json!(cayley.rank()));
    map.insert("kernel_dim".into(), json!(integer_kernel_basis(&cayley).dim()));
    map.insert("inline_rates".into(), json!(parsed.rates().is_some()));
    Ok(Outcome::ok(Output::json(v)))
}

pub fn tree_constants(network: &str, rates: Option<PathBuf>, limit: usize) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let rates = resolve_rates(&parsed, rates.as_deref())?;
    let counts = monomial_counts(net, limit).ok();
    let (values, class_of): (Vec<Value>, Vec<usize>) = match rates.exact_values() {
        Some(q) => {
            let tc = tree_constants_minor(net, &q)?;
            (tc.values.iter().map(|x| json!(x.to_string())).collect(), tc.class_of)
        }
        None => {
            let tc = tree_constants_minor(net, &rates.float_values())?;
            (tc.values.iter().map(|&x| json!(x)).collect(), tc.class_of)
        }
    };
    let mut table = Table::new(&["index", "linkage_class", "value", "monomial_count"]);
    let rows: Vec<Value> = values
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let mut m = Map::new();
            m.insert("index".into(), json!(i + 1));
            m.insert("linkage_class".into(), json!(class_of[i] + 1));
            m.insert("value".into(), value);
            if let Some(c) = &counts {
                m.insert("monomial_count".into(), json!(c[i]));
            }
            let m = Value::Object(m);
            table.rows.push(
                ["index", "linkage_class", "value", "monomial_count"]
                    .iter()
                    .map(|k| crate::report::cell(&m[*k]))
                    .collect(),
            );
            m
        })
        .collect();
    Ok(Outcome::ok(Output {
        json: Value::Array(rows),
        table: Some(table),
    }))
}

fn membership_json<T: ToString>(d: &MembershipDecision<T>, exact: bool, f: impl Fn(&T) -> f64) -> Value {
    let mut m = Map::new();
    m.insert("balanced".into(), json!(d.balanced));
    m.insert("kernel_dim".into(), json!(d.kernel_dim));
    m.insert("weakly_reversible".into(), json!(d.weakly_reversible));
    m.insert("exact".into(), json!(exact));
    if let Some(v) = &d.violated {
        m.insert(
            "violated_binomial".into(),
            json!({
                "binomial": v.binomial.render("K"),
                "u_plus": v.binomial.u_plus,
                "u_minus": v.binomial.u_minus,
                "lhs": exact_or_float(exact, &v.lhs, f(&v.lhs)),
                "rhs": exact_or_float(exact, &v.rhs, f(&v.rhs)),
            }),
        );
    }
    Value::Object(m)
}

pub fn check_cb(network: &str, rates: Option<PathBuf>, tol: f64) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let rates = resolve_rates(&parsed, rates.as_deref())?;
    let (json, balanced, weakly_reversible, violated) = match rates.exact_values() {
        Some(q) => {
            let d = moduli_membership_exact(net, &q)?;
            let r = d.violated.as_ref().map(|v| v.binomial.render("K"));
            (membership_json(&d, true, toric_crn::Scalar::to_f64), d.balanced, d.weakly_reversible, r)
        }
        None => {
            let d = moduli_membership_float(net, &rates.float_values(), tol)?;
            let r = d.violated.as_ref().map(|v| v.binomial.render("K"));
            (membership_json(&d, false, |x| *x), d.balanced, d.weakly_reversible, r)
        }
    };
    let failure = (!balanced).then(|| match violated {
        Some(b) => format!("not complex balancing: violated binomial {b}"),
        None if !weakly_reversible => "not complex balancing: network is not weakly reversible".into(),
        None => "not complex balancing".into(),
    });
    Ok(Outcome {
        output: Output::json(json),
        failure,
    })
}

fn circuit_json<T: ToString>(v: &CircuitViolation<T>, exact: bool, x: f64) -> Value {
    json!({
        "pairs": v.pairs,
        "exponents": v.exponents,
        "product": exact_or_float(exact, &v.product, x),
    })
}

pub fn check_db(network: &str, rates: Option<PathBuf>, tol: f64) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let rates = resolve_rates(&parsed, rates.as_deref())?;
    let (ok, reason, violated, exact) = match rates.exact_values() {
        Some(q) => {
            let d = detailed_balancing_exact(net, &q)?;
            let v = d
                .violated
                .as_ref()
                .map(|v| circuit_json(v, true, toric_crn::Scalar::to_f64(&v.product)));
            (d.detailed_balancing, d.reason, v, true)
        }
        None => {
            let d = detailed_balancing_float(net, &rates.float_values(), tol)?;
            let v = d.violated.as_ref().map(|v| circuit_json(v, false, v.product));
            (d.detailed_balancing, d.reason, v, false)
        }
    };
    let mut m = Map::new();
    m.insert("detailed_balancing".into(), json!(ok));
    m.insert("exact".into(), json!(exact));
    if let Some(r) = &reason {
        m.insert("reason".into(), json!(r));
    }
    if let Some(v) = &violated {
        m.insert("violated_circuit".into(), v.clone());
    }
    let failure = (!ok).then(|| match (&reason, &violated) {
        (Some(r), _) => format!("not detailed balancing: {r}"),
        (None, Some(v)) => format!(
            "not detailed balancing: circuit over pairs {} has product {}",
            v["pairs"], crate::report::cell(&v["product"])
        ),
        (None, None) => "not detailed balancing".into(),
    });
    Ok(Outcome {
        output: Output::json(Value::Object(m)),
        failure,
    })
}

fn birch_config(tol: f64) -> BirchConfig {
    BirchConfig {
        balance_tol: tol,
        ..BirchConfig::default()
    }
}

pub fn birch(network: &str, rates: Option<PathBuf>, initial: &str, tol: f64) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let rates = resolve_rates(&parsed, rates.as_deref())?;
    let c0 = parse_vector(initial, net.s())?;
    let bp = birch_point(net, &rates, &c0, &birch_config(tol))?;
    Ok(Outcome::ok(Output::json(json!({
        "c_star": bp.c_star,
        "residuals": bp.residuals,
        "iterations": bp.iterations,
    }))))
}

pub struct SimulateArgs {
    pub rates: Option<PathBuf>,
    pub initial: String,
    pub t_end: f64,
    pub method: Method,
    pub step: f64,
    pub sample_every: usize,
    pub out: Option<PathBuf>,
}

fn trajectory_table(net: &ReactionNetwork, sim: &Simulation) -> Table {
    let mut header = vec!["t".to_string()];
    header.extend((1..=net.s()).map(|i| format!("c_{i}")));
    header.extend(
        ["E", "conservation_drift", "boundary_distance", "dist_to_birch"]
            .iter()
            .map(|h| h.to_string()),
    );
    let num = |x: f64| format!("{x:?}");
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let tr = &sim.trajectory;
    let rows = tr
        .times
        .iter()
        .zip(&tr.states)
        .zip(&tr.monitors)
        .map(|((t, c), m)| {
            let mut row = vec![num(*t)];
            row.extend(c.iter().map(|&x| num(x)));
            row.push(opt(m.entropy));
            row.push(num(m.conservation_drift));
            row.push(num(m.boundary_distance));
            row.push(opt(m.distance_to_birch));
            row
        })
        .collect();
    Table { header, rows }
}

pub fn simulate_cmd(network: &str, args: SimulateArgs) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let rates = resolve_rates(&parsed, args.rates.as_deref())?;
    let c0 = parse_vector(&args.initial, net.s())?;
    let cfg = IntegratorConfig {
        method: args.method,
        step: args.step,
        t_end: args.t_end,
        sample_every: args.sample_every,
        ..IntegratorConfig::default()
    };
    let sim = simulate(net, &rates, &c0, &cfg)?;
    let table = trajectory_table(net, &sim);
    let tr = &sim.trajectory;
    let last = tr.monitors.last();
    let mut summary = json!({
        "termination": sim.termination,
        "samples": tr.len(),
        "t_final": tr.times.last(),
        "final_state": tr.last_state(),
        "birch_point": sim.birch.as_ref().map(|b| &b.c_star),
        "final_distance_to_birch": last.and_then(|m| m.distance_to_birch),
        "max_conservation_drift": tr.monitors.iter().map(|m| m.conservation_drift).fold(0.0, f64::max),
        "max_entropy_increase": max_entropy_increase(&sim),
    });
    let output = match &args.out {
        Some(path) => {
            fs::write(path, csv_string(&table)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            summary["out"] = json!(path.display().to_string());
            Output::json(summary)
        }
        None => Output {
            json: summary,
            table: Some(table),
        },
    };
    Ok(Outcome::ok(output))
}

/// Largest increase of E between consecutive samples, relative to `max(1, E)`.
fn max_entropy_increase(sim: &Simulation) -> Option<f64> {
    let e: Vec<f64> = sim.trajectory.monitors.iter().map(|m| m.entropy).collect::<Option<_>>()?;
    Some(
        e.windows(2)
            .map(|w| (w[1] - w[0]) / w[0].abs().max(1.0))
            .fold(0.0, f64::max),
    )
}

pub fn strata(
    network: &str,
    rates: Option<PathBuf>,
    initial: &str,
    face: &str,
    t_end: f64,
    tol: f64,
) -> Result<Outcome, CliError> {
    let parsed = load_network(network)?;
    let net = &parsed.network;
    let rates = resolve_rates(&parsed, rates.as_deref())?;
    let c0 = parse_vector(initial, net.s())?;
    let face = parse_face(face, net.s())?;
    let cfg = IntegratorConfig {
        t_end,
        ..IntegratorConfig::default()
    };
    let a = analyze_strata(net, &rates, &c0, &face, &cfg)?;
    let orientations: Vec<Value> = a
        .orientations
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let arcs: Vec<[usize; 2]> = o.arcs(net).iter().map(|&(i, j)| [i + 1, j + 1]).collect();
            let order: Vec<usize> = o.topological_order.iter().map(|i| i + 1).collect();
            json!({"index": k + 1, "arcs": arcs, "topological_order": order})
        })
        .collect();
    let certificates: Vec<Value> = a
        .certificates
        .iter()
        .zip(&a.orientations)
        .enumerate()
        .map(|(k, (c, o))| {
            let verified = c.verify(net, o);
            match c {
                FarkasOutcome::Feasible(f) => json!({
                    "orientation": k + 1,
                    "feasible": true,
                    "alpha": strings(&f.alpha),
                    "slacks": strings(&f.slacks),
                    "verified": verified,
                }),
                FarkasOutcome::Infeasible(d) => json!({
                    "orientation": k + 1,
                    "feasible": false,
                    "lambda": strings(&d.lambda),
                    "v": strings(&d.v),
                    "verified": verified,
                }),
            }
        })
        .collect();
    let unverified = a.certificates.iter().zip(&a.orientations).any(|(c, o)| !c.verify(net, o));
    let failure = if unverified {
        Some("a certificate failed exact verification".to_string())
    } else {
        a.descent
            .minimum
            .filter(|&m| m < -tol)
            .map(|m| format!("descent inner product reached {m:e}"))
    };
    let json = json!({
        "face": a.face.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "scaling": a.scaling.values,
        "birch_point": a.scaling.birch_point,
        "orientations": orientations,
        "certificates": certificates,
        "descent_minimum": a.descent.minimum,
        "descent_evaluated": a.descent.evaluated,
        "missing_certificate": a.descent.missing_certificate.len(),
    });
    Ok(Outcome {
        output: Output::json(json),
        failure,
    })
}

pub fn corpus(seed: u64, samples: usize) -> Result<Outcome, CliError> {
    let report = run_corpus(seed, samples)?;
    let mut table = Table::new(&[
        "name",
        "n",
        "l",
        "s",
        "sigma",
        "delta",
        "weakly_reversible",
        "inline_cb",
        "sampled_cb",
        "samples",
        "status",
    ]);
    for r in &report.rows {
        table.rows.push(vec![
            r.name.clone(),
            r.n.to_string(),
            r.l.to_string(),
            r.s.to_string(),
            r.sigma.to_string(),
            r.delta.to_string(),
            r.weakly_reversible.to_string(),
            r.inline_cb.to_string(),
            r.sampled_cb.to_string(),
            r.samples.to_string(),
            if r.passed() { "ok".into() } else { r.mismatches.join("; ") },
        ]);
    }
    let failure = (!report.passed()).then(|| {
        let bad: Vec<&str> = report.rows.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
        format!("corpus mismatches in {}", bad.join(", "))
    });
    let mut json = serde_json::to_value(&report)?;
    json["passed"] = json!(report.passed());
    Ok(Outcome {
        output: Output {
            json,
            table: Some(table),
        },
        failure,
    })
}
