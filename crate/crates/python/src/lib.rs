//! Python bindings: networks, balancing decisions, Birch points, trajectories
//! and strata certificates.
//!
//! Complex and species indices are 1-based on the Python side. Rates are a
//! list aligned with `Network.edges`; `str` and `int` entries are exact,
//! `float` entries are floating point. Omitted rates fall back to the
//! inline values of the network file.

use std::path::Path;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyInt;

use toric::balancing::{detailed_balancing_exact, detailed_balancing_float, CircuitViolation};
use toric::birch::{birch_point as compute_birch, BirchConfig};
use toric::cayley::{moduli_membership_exact, moduli_membership_float, MembershipDecision};
use toric::corpus::{bundled_source, run_corpus as corpus_report};
use toric::dynamics::{simulate as integrate, IntegratorConfig, Method, Termination};
use toric::rates::parse_rational;
use toric::strata::{acyclic_orientations as orientations_of, analyze_strata, FarkasOutcome};
use toric::tree::tree_constants_minor;
use toric::{parse_network, to_dsl, ParsedNetwork, Rate, RateAssignment, Scalar};

create_exception!(toric_crn, ToricError, PyException, "A domain failure of the analysis.");

fn py_err(e: toric::Error) -> PyErr {
    use toric::Error as E;
    match e {
        E::ClassTooLarge { .. }
        | E::TooManyPairs { .. }
        | E::NotWeaklyReversible
        | E::NotReversible(_)
        | E::NotComplexBalancing { .. }
        | E::NotDetailedBalancing
        | E::NegativeConcentration
        | E::MaxIterations { .. }
        | E::NonFinite { .. } => ToricError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A parsed reaction network with its inline rates.
#[pyclass(frozen)]
struct Network {
    parsed: ParsedNetwork,
}

#[pymethods]
impl Network {
    /// Parses network text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_network(text).map(|parsed| Self { parsed }).map_err(py_err)
    }

    /// Reads a network file, or a bundled example by name.
    #[staticmethod]
    fn load(name_or_path: &str) -> PyResult<Self> {
        let path = Path::new(name_or_path);
        let text = if path.exists() {
            std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{name_or_path}: {e}")))?
        } else {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or(name_or_path);
            bundled_source(name)
                .ok_or_else(|| PyValueError::new_err(format!("{name_or_path}: no such file or bundled network")))?
                .to_string()
        };
        Self::parse(&text)
    }

    #[getter]
    fn species(&self) -> Vec<String> {
        self.parsed.network.species().to_vec()
    }

    #[getter]
    fn complexes(&self) -> Vec<String> {
        self.parsed.network.structural_report().complexes
    }

    /// `(source, target)` pairs, 1-based.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.parsed.network.structural_report().edges
    }

    #[getter]
    fn linkage_classes(&self) -> Vec<Vec<usize>> {
        self.parsed.network.structural_report().linkage_classes
    }

    #[getter]
    fn n(&self) -> usize {
        self.parsed.network.n()
    }

    #[getter]
    fn l(&self) -> usize {
        self.parsed.network.linkage_classes().count()
    }

    #[getter]
    fn s(&self) -> usize {
        self.parsed.network.s()
    }

    #[getter]
    fn sigma(&self) -> usize {
        self.parsed.network.stoichiometric_subspace().sigma
    }

    #[getter]
    fn delta(&self) -> usize {
        self.parsed.network.deficiency()
    }

    #[getter]
    fn weakly_reversible(&self) -> bool {
        self.parsed.network.is_weakly_reversible()
    }

    #[getter]
    fn reversible(&self) -> bool {
        self.parsed.network.is_reversible()
    }

    /// Inline rates as strings, or `None` when some edge has none.
    fn inline_rates(&self) -> Option<Vec<String>> {
        self.parsed
            .rates()
            .map(|r| r.values().iter().map(Rate::to_string).collect())
    }

    fn to_dsl(&self) -> String {
        to_dsl(&self.parsed.network, self.parsed.rates().as_ref())
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(n={}, l={}, s={}, sigma={}, delta={})",
            self.n(),
            self.l(),
            self.s(),
            self.sigma(),
            self.delta()
        )
    }
}

fn rate_of(item: &Bound<'_, PyAny>) -> PyResult<Rate> {
    if let Ok(s) = item.extract::<String>() {
        return parse_rational(&s)
            .map(Rate::Exact)
            .ok_or_else(|| PyValueError::new_err(format!("bad rate `{s}`")));
    }
    if item.is_instance_of::<PyInt>() {
        let digits = item.str()?.to_string();
        return parse_rational(&digits)
            .map(Rate::Exact)
            .ok_or_else(|| PyValueError::new_err(format!("bad rate `{digits}`")));
    }
    Ok(Rate::Float(item.extract::<f64>()?))
}

fn resolve(net: &Network, rates: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<RateAssignment> {
    match rates {
        Some(items) => {
            let values = items.iter().map(rate_of).collect::<PyResult<Vec<Rate>>>()?;
            RateAssignment::new(&net.parsed.network, values).map_err(py_err)
        }
        None => net
            .parsed
            .rates()
            .ok_or_else(|| PyValueError::new_err("network has no inline rates; pass `rates`")),
    }
}

fn to_zero_based(indices: &[usize], bound: usize, what: &str) -> PyResult<Vec<usize>> {
    indices
        .iter()
        .map(|&i| {
            if (1..=bound).contains(&i) {
                Ok(i - 1)
            } else {
                Err(PyValueError::new_err(format!("{what} index {i} out of range 1..={bound}")))
            }
        })
        .collect()
}

/// Tree constants `K_i` as floats.
#[pyfunction]
#[pyo3(signature = (net, rates=None))]
fn tree_constants(net: &Network, rates: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<Vec<f64>> {
    let r = resolve(net, rates)?;
    toric::balancing::tree_constants_f64(&net.parsed.network, &r).map_err(py_err)
}

/// Tree constants `K_i` as exact rational strings.
#[pyfunction]
#[pyo3(signature = (net, rates=None))]
fn tree_constants_exact(net: &Network, rates: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<Vec<String>> {
    let r = resolve(net, rates)?;
    let q = r
        .exact_values()
        .ok_or_else(|| PyValueError::new_err("exact tree constants need exact rates"))?;
    let tc = tree_constants_minor(&net.parsed.network, &q).map_err(py_err)?;
    Ok(tc.values.iter().map(ToString::to_string).collect())
}

#[pyclass(frozen, get_all)]
struct Membership {
    balanced: bool,
    exact: bool,
    kernel_dim: usize,
    weakly_reversible: bool,
    /// Rendered like `K1*K3 - K2^2`.
    violated_binomial: Option<String>,
    violated_sides: Option<(String, String)>,
}

impl Membership {
    fn new<T: ToString>(d: MembershipDecision<T>, exact: bool) -> Self {
        Self {
            balanced: d.balanced,
            exact,
            kernel_dim: d.kernel_dim,
            weakly_reversible: d.weakly_reversible,
            violated_binomial: d.violated.as_ref().map(|v| v.binomial.render("K")),
            violated_sides: d.violated.map(|v| (v.lhs.to_string(), v.rhs.to_string())),
        }
    }
}

#[pymethods]
impl Membership {
    fn __repr__(&self) -> String {
        format!(
            "Membership(balanced={}, kernel_dim={}, violated_binomial={:?})",
            self.balanced, self.kernel_dim, self.violated_binomial
        )
    }
}

/// Complex balancing decision; exact when every rate is exact.
#[pyfunction]
#[pyo3(signature = (net, rates=None, tol=1e-9))]
fn check_cb(net: &Network, rates: Option<Vec<Bound<'_, PyAny>>>, tol: f64) -> PyResult<Membership> {
    let r = resolve(net, rates)?;
    let g = &net.parsed.network;
    Ok(match r.exact_values() {
        Some(q) => Membership::new(moduli_membership_exact(g, &q).map_err(py_err)?, true),
        None => Membership::new(moduli_membership_float(g, &r.float_values(), tol).map_err(py_err)?, false),
    })
}

#[pyclass(frozen, get_all)]
struct DetailedBalance {
    detailed_balancing: bool,
    exact: bool,
    reason: Option<String>,
    /// 1-based `(i, j)` of each pair in the violated circuit.
    violated_pairs: Option<Vec<(usize, usize)>>,
    violated_exponents: Option<Vec<i64>>,
    violated_product: Option<String>,
}

impl DetailedBalance {
    fn new<T: ToString>(ok: bool, exact: bool, reason: Option<String>, v: Option<CircuitViolation<T>>) -> Self {
        Self {
            detailed_balancing: ok,
            exact,
            reason,
            violated_pairs: v.as_ref().map(|v| v.pairs.clone()),
            violated_exponents: v.as_ref().map(|v| v.exponents.clone()),
            violated_product: v.map(|v| v.product.to_string()),
        }
    }
}

/// Detailed balancing decision; exact when every rate is exact.
#[pyfunction]
#[pyo3(signature = (net, rates=None, tol=1e-9))]
fn check_db(net: &Network, rates: Option<Vec<Bound<'_, PyAny>>>, tol: f64) -> PyResult<DetailedBalance> {
    let r = resolve(net, rates)?;
    let g = &net.parsed.network;
    Ok(match r.exact_values() {
        Some(q) => {
            let d = detailed_balancing_exact(g, &q).map_err(py_err)?;
            DetailedBalance::new(d.detailed_balancing, true, d.reason, d.violated)
        }
        None => {
            let d = detailed_balancing_float(g, &r.float_values(), tol).map_err(py_err)?;
            DetailedBalance::new(d.detailed_balancing, false, d.reason, d.violated)
        }
    })
}

#[pyclass(frozen, get_all)]
struct Birch {
    c_star: Vec<f64>,
    iterations: usize,
    affine_residual: f64,
    orthogonality_residual: f64,
    steady_residual: f64,
}

/// The positive steady state in `(c0 + S)`; raises `ToricError` when the
/// system is not complex balancing.
#[pyfunction]
#[pyo3(signature = (net, initial, rates=None))]
fn birch_point(net: &Network, initial: Vec<f64>, rates: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<Birch> {
    let r = resolve(net, rates)?;
    let bp = compute_birch(&net.parsed.network, &r, &initial, &BirchConfig::default()).map_err(py_err)?;
    Ok(Birch {
        c_star: bp.c_star,
        iterations: bp.iterations,
        affine_residual: bp.residuals.affine,
        orthogonality_residual: bp.residuals.orthogonality,
        steady_residual: bp.residuals.steady,
    })
}

#[pyclass(frozen, get_all)]
struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    entropy: Vec<Option<f64>>,
    conservation_drift: Vec<f64>,
    boundary_distance: Vec<f64>,
    distance_to_birch: Vec<Option<f64>>,
    /// One of `end_time`, `converged`, `step_collapse`, `max_steps`.
    termination: String,
    birch_point: Option<Vec<f64>>,
}

/// Integrates the mass-action system from `initial`.
#[pyfunction]
#[pyo3(signature = (net, initial, rates=None, t_end=10.0, method="rk45", step=1e-3, sample_every=1))]
fn simulate(
    net: &Network,
    initial: Vec<f64>,
    rates: Option<Vec<Bound<'_, PyAny>>>,
    t_end: f64,
    method: &str,
    step: f64,
    sample_every: usize,
) -> PyResult<Trajectory> {
    let r = resolve(net, rates)?;
    let method = match method {
        "rk4" => Method::Rk4,
        "rk45" => Method::Rk45,
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    };
    let cfg = IntegratorConfig {
        method,
        step,
        t_end,
        sample_every,
        ..IntegratorConfig::default()
    };
    let sim = integrate(&net.parsed.network, &r, &initial, &cfg).map_err(py_err)?;
    let termination = match sim.termination {
        Termination::EndTime => "end_time",
        Termination::Converged => "converged",
        Termination::StepCollapse => "step_collapse",
        Termination::MaxSteps => "max_steps",
    };
    let m = &sim.trajectory.monitors;
    Ok(Trajectory {
        entropy: m.iter().map(|x| x.entropy).collect(),
        conservation_drift: m.iter().map(|x| x.conservation_drift).collect(),
        boundary_distance: m.iter().map(|x| x.boundary_distance).collect(),
        distance_to_birch: m.iter().map(|x| x.distance_to_birch).collect(),
        times: sim.trajectory.times,
        states: sim.trajectory.states,
        termination: termination.to_string(),
        birch_point: sim.birch.map(|b| b.c_star),
    })
}

/// Every acyclic orientation as a list of 1-based `(source, target)` arcs.
#[pyfunction]
fn acyclic_orientations(net: &Network) -> PyResult<Vec<Vec<(usize, usize)>>> {
    let g = &net.parsed.network;
    Ok(orientations_of(g)
        .map_err(py_err)?
        .iter()
        .map(|o| o.arcs(g).iter().map(|&(i, j)| (i + 1, j + 1)).collect())
        .collect())
}

#[pyclass(frozen, get_all)]
struct Strata {
    face: Vec<usize>,
    scaling: Vec<f64>,
    orientations: Vec<Vec<(usize, usize)>>,
    /// Exact `alpha` per orientation, `None` where no Farkas vector exists.
    alphas: Vec<Option<Vec<String>>>,
    /// Every certificate, primal or dual, re-checked exactly.
    verified: bool,
    descent_minimum: Option<f64>,
    descent_evaluated: usize,
}

/// Orientations, Farkas certificates for the 1-based `face`, and the descent
/// check along a simulated trajectory.
#[pyfunction]
#[pyo3(signature = (net, initial, face, rates=None, t_end=20.0))]
fn strata(
    net: &Network,
    initial: Vec<f64>,
    face: Vec<usize>,
    rates: Option<Vec<Bound<'_, PyAny>>>,
    t_end: f64,
) -> PyResult<Strata> {
    let r = resolve(net, rates)?;
    let g = &net.parsed.network;
    let face = to_zero_based(&face, g.s(), "species")?;
    let cfg = IntegratorConfig {
        t_end,
        ..IntegratorConfig::default()
    };
    let a = analyze_strata(g, &r, &initial, &face, &cfg).map_err(py_err)?;
    Ok(Strata {
        face: a.face.iter().map(|i| i + 1).collect(),
        scaling: a.scaling.values,
        verified: a.certificates.iter().zip(&a.orientations).all(|(c, o)| c.verify(g, o)),
        alphas: a
            .certificates
            .iter()
            .map(|c| match c {
                FarkasOutcome::Feasible(f) => Some(f.alpha.iter().map(ToString::to_string).collect()),
                FarkasOutcome::Infeasible(_) => None,
            })
            .collect(),
        orientations: a
            .orientations
            .iter()
            .map(|o| o.arcs(g).iter().map(|&(i, j)| (i + 1, j + 1)).collect())
            .collect(),
        descent_minimum: a.descent.minimum,
        descent_evaluated: a.descent.evaluated,
    })
}

#[pyclass(frozen, get_all)]
struct CorpusRow {
    name: String,
    n: usize,
    l: usize,
    s: usize,
    sigma: usize,
    delta: usize,
    weakly_reversible: bool,
    inline_cb: bool,
    sampled_cb: usize,
    samples: usize,
    mismatches: Vec<String>,
}

/// Runs every bundled network against its known invariants.
#[pyfunction]
#[pyo3(signature = (seed=1, samples=20))]
fn run_corpus(seed: u64, samples: usize) -> PyResult<Vec<CorpusRow>> {
    Ok(corpus_report(seed, samples)
        .map_err(py_err)?
        .rows
        .into_iter()
        .map(|r| CorpusRow {
            name: r.name,
            n: r.n,
            l: r.l,
            s: r.s,
            sigma: r.sigma,
            delta: r.delta,
            weakly_reversible: r.weakly_reversible,
            inline_cb: r.inline_cb,
            sampled_cb: r.sampled_cb,
            samples: r.samples,
            mismatches: r.mismatches,
        })
        .collect())
}

/// Transformed entropy `E(c)` relative to `c_star`.
#[pyfunction]
fn entropy(c: Vec<f64>, c_star: Vec<f64>) -> PyResult<f64> {
    toric::birch::transformed_entropy(&c, &c_star).map_err(py_err)
}

/// Floating value of a rational string, e.g. `"19/4"`.
#[pyfunction]
fn rational_to_float(text: &str) -> PyResult<f64> {
    parse_rational(text)
        .map(|q| q.to_f64())
        .ok_or_else(|| PyValueError::new_err(format!("bad rational `{text}`")))
}

#[pymodule]
fn toric_crn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ToricError", m.py().get_type::<ToricError>())?;
    m.add_class::<Network>()?;
    m.add_class::<Membership>()?;
    m.add_class::<DetailedBalance>()?;
    m.add_class::<Birch>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<Strata>()?;
    m.add_class::<CorpusRow>()?;
    m.add_function(wrap_pyfunction!(tree_constants, m)?)?;
    m.add_function(wrap_pyfunction!(tree_constants_exact, m)?)?;
    m.add_function(wrap_pyfunction!(check_cb, m)?)?;
    m.add_function(wrap_pyfunction!(check_db, m)?)?;
    m.add_function(wrap_pyfunction!(birch_point, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(acyclic_orientations, m)?)?;
    m.add_function(wrap_pyfunction!(strata, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(rational_to_float, m)?)?;
    Ok(())
}
