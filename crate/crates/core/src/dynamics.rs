//! Mass-action dynamics `dc/dt = Ψ(c)·A_κ·Y`, numerical integration and the
//! trajectory monitors (entropy, conservation drift, boundary distance,
//! distance to the Birch point).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::balancing::reversible_pairing;
use crate::birch::{birch_point, orthonormal_stoichiometric_basis, transformed_entropy, BirchConfig, BirchPoint};
use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::rates::{check_domain, laplacian, RateAssignment};

/// Literal `Ψ(c)·A_κ·Y`.
pub fn mass_action_rhs(net: &ReactionNetwork, rates: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    let a = laplacian(net, rates)?;
    let psi: Vec<f64> = net.complexes().iter().map(|y| y.monomial(c)).collect();
    let n = net.n();
    let flux: Vec<f64> = (0..n).map(|j| (0..n).map(|i| psi[i] * a[i][j]).sum()).collect();
    let mut out = vec![0.0; net.s()];
    for (j, y) in net.complexes().iter().enumerate() {
        for (k, &e) in y.0.iter().enumerate() {
            out[k] += flux[j] * e as f64;
        }
    }
    Ok(out)
}

/// Per-edge form `Σ_(i,j) κ_ij c^{y_i} (y_j - y_i)`, used inside the
/// integrators.
fn edge_rhs(net: &ReactionNetwork, rates: &[f64], vectors: &[Vec<i64>], c: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for ((e, k), v) in net.edges().iter().zip(rates).zip(vectors) {
        let flux = k * net.complexes()[e.source].monomial(c);
        for (o, &d) in out.iter_mut().zip(v) {
            *o += flux * d as f64;
        }
    }
}

/// `Σ_{i,j} (κ_ij c^{y_i} - κ_ji c^{y_j}) (y_j - y_i)` over reversible pairs.
pub fn reversible_pair_rhs(net: &ReactionNetwork, rates: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    check_domain(net, rates)?;
    let pairing = reversible_pairing(net);
    if !pairing.is_complete() {
        return Err(Error::NotReversible(pairing.leftover.len()));
    }
    let mut out = vec![0.0; net.s()];
    for p in &pairing.pairs {
        let yi = &net.complexes()[p.i];
        let yj = &net.complexes()[p.j];
        let w = rates[p.forward] * yi.monomial(c) - rates[p.backward] * yj.monomial(c);
        for (k, o) in out.iter_mut().enumerate() {
            *o += w * (yj.0[k] as f64 - yi.0[k] as f64);
        }
    }
    Ok(out)
}

/// `Σ_{i,j} ((L*c)^{y_i} - (L*c)^{y_j}) (y_j - y_i)` over reversible pairs.
pub fn detailed_rhs(net: &ReactionNetwork, l: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    let pairing = reversible_pairing(net);
    if !pairing.is_complete() {
        return Err(Error::NotReversible(pairing.leftover.len()));
    }
    let lc: Vec<f64> = l.iter().zip(c).map(|(a, b)| a * b).collect();
    let mut out = vec![0.0; net.s()];
    for p in &pairing.pairs {
        let yi = &net.complexes()[p.i];
        let yj = &net.complexes()[p.j];
        let w = yi.monomial(&lc) - yj.monomial(&lc);
        for (k, o) in out.iter_mut().enumerate() {
            *o += w * (yj.0[k] as f64 - yi.0[k] as f64);
        }
    }
    Ok(out)
}

/// `P = (c0 + S) ∩ R^s_{>=0}` described by `c0` and an orthonormal basis of `S`.
#[derive(Debug, Clone)]
pub struct InvariantPolyhedron {
    pub c0: Vec<f64>,
    pub basis: DMatrix<f64>,
}

impl InvariantPolyhedron {
    pub fn new(net: &ReactionNetwork, c0: &[f64]) -> Self {
        Self {
            c0: c0.to_vec(),
            basis: orthonormal_stoichiometric_basis(net),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Projection of `v` onto `S`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(v);
        (&self.basis * (self.basis.transpose() * v)).iter().copied().collect()
    }

    /// Norm of the component of `c - c0` orthogonal to `S`.
    pub fn conservation_drift(&self, c: &[f64]) -> f64 {
        let d = DVector::from_iterator(c.len(), c.iter().zip(&self.c0).map(|(a, b)| a - b));
        let off = &d - &self.basis * (self.basis.transpose() * &d);
        off.norm()
    }

    /// Distance within `c0 + S` from `c` to the nearest coordinate hyperplane
    /// `c_i = 0` that the affine space actually crosses. Infinite when no
    /// coordinate can vary.
    pub fn boundary_distance(&self, c: &[f64]) -> f64 {
        (0..c.len())
            .filter_map(|i| {
                let reach = self.basis.row(i).norm();
                (reach > 1e-12).then(|| c[i].max(0.0) / reach)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn boundary_distance(c: &[f64], polyhedron: &InvariantPolyhedron) -> f64 {
    polyhedron.boundary_distance(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for RK45.
    pub step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    pub max_steps: usize,
    /// Record a sample every this many accepted steps.
    pub sample_every: usize,
    /// Give up when the step falls below this.
    pub min_step: f64,
    /// Halt once `‖c - c*‖` is at most this (needs a Birch point).
    pub convergence_tol: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45,
            step: 1e-3,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            t_end: 100.0,
            max_steps: 1_000_000,
            sample_every: 1,
            min_step: 1e-14,
            convergence_tol: None,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.t_end > 0.0
            && self.sample_every > 0
            && self.min_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "step, tolerances, t_end and sample cadence must be positive".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSample {
    /// Transformed entropy relative to the Birch point, if one is known.
    pub entropy: Option<f64>,
    pub conservation_drift: f64,
    pub boundary_distance: f64,
    pub distance_to_birch: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitors: Vec<MonitorSample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    EndTime,
    Converged,
    StepCollapse,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    pub trajectory: Trajectory,
    pub termination: Termination,
    /// `None` when the system is not complex balancing.
    pub birch: Option<BirchPoint>,
}

struct Monitor<'a> {
    polyhedron: InvariantPolyhedron,
    c_star: Option<&'a [f64]>,
}

impl Monitor<'_> {
    fn sample(&self, c: &[f64]) -> MonitorSample {
        let clipped: Vec<f64> = c.iter().map(|&x| x.max(0.0)).collect();
        MonitorSample {
            entropy: self.c_star.and_then(|cs| transformed_entropy(&clipped, cs).ok()),
            conservation_drift: self.polyhedron.conservation_drift(c),
            boundary_distance: self.polyhedron.boundary_distance(c),
            distance_to_birch: self
                .c_star
                .map(|cs| c.iter().zip(cs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()),
        }
    }
}

const NEGATIVE_SLACK: f64 = -1e-12;

// Dormand–Prince 5(4) tableau (the system is autonomous, so the nodes are unused)
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Rhs<'a> {
    net: &'a ReactionNetwork,
    rates: Vec<f64>,
    vectors: Vec<Vec<i64>>,
}

impl Rhs<'_> {
    fn eval(&self, c: &[f64], out: &mut [f64]) {
        edge_rhs(self.net, &self.rates, &self.vectors, c, out);
    }
}

fn rk4_step(f: &Rhs, c: &[f64], h: f64) -> Vec<f64> {
    let s = c.len();
    let mut k1 = vec![0.0; s];
    let mut k2 = vec![0.0; s];
    let mut k3 = vec![0.0; s];
    let mut k4 = vec![0.0; s];
    let mut tmp = vec![0.0; s];
    f.eval(c, &mut k1);
    for i in 0..s {
        tmp[i] = c[i] + 0.5 * h * k1[i];
    }
    f.eval(&tmp, &mut k2);
    for i in 0..s {
        tmp[i] = c[i] + 0.5 * h * k2[i];
    }
    f.eval(&tmp, &mut k3);
    for i in 0..s {
        tmp[i] = c[i] + h * k3[i];
    }
    f.eval(&tmp, &mut k4);
    (0..s)
        .map(|i| c[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// One Dormand–Prince step: the 5th-order solution and the scaled error norm.
fn dp_step(f: &Rhs, c: &[f64], h: f64, cfg: &IntegratorConfig) -> (Vec<f64>, f64) {
    let s = c.len();
    let mut k = vec![vec![0.0; s]; 7];
    let mut tmp = vec![0.0; s];
    f.eval(c, &mut k[0]);
    for stage in 1..7 {
        for i in 0..s {
            tmp[i] = c[i] + h * (0..stage).map(|j| DP_A[stage][j] * k[j][i]).sum::<f64>();
        }
        f.eval(&tmp, &mut k[stage]);
    }
    let y5: Vec<f64> = (0..s)
        .map(|i| c[i] + h * (0..7).map(|j| DP_B5[j] * k[j][i]).sum::<f64>())
        .collect();
    let err = (0..s)
        .map(|i| {
            let e = h * (0..7).map(|j| (DP_B5[j] - DP_B4[j]) * k[j][i]).sum::<f64>();
            let scale = cfg.abs_tol + cfg.rel_tol * c[i].abs().max(y5[i].abs());
            (e / scale).abs()
        })
        .fold(0.0, f64::max);
    (y5, err)
}

/// Integrates from `c0`, recording monitor samples.
///
/// Steps that would push a component below `-1e-12` are rejected and retried
/// with half the step. Step collapse ends the run early and is reported in
/// [`Simulation::termination`] with the partial trajectory.
pub fn simulate(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    c0: &[f64],
    config: &IntegratorConfig,
) -> Result<Simulation> {
    config.validate()?;
    if c0.len() != net.s() {
        return Err(Error::LengthMismatch {
            expected: net.s(),
            got: c0.len(),
        });
    }
    if c0.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::NonPositiveInitial);
    }
    let birch = birch_point(net, rates, c0, &BirchConfig::default()).ok();
    let monitor = Monitor {
        polyhedron: InvariantPolyhedron::new(net, c0),
        c_star: birch.as_ref().map(|b| b.c_star.as_slice()),
    };
    let f = Rhs {
        net,
        rates: rates.float_values(),
        vectors: net.reaction_vectors(),
    };

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![c0.to_vec()],
        monitors: vec![monitor.sample(c0)],
    };
    let converged = |c: &[f64]| match (config.convergence_tol, monitor.c_star) {
        (Some(tol), Some(cs)) => c.iter().zip(cs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= tol,
        _ => false,
    };

    let mut t = 0.0;
    let mut c = c0.to_vec();
    let mut h = config.step.min(config.t_end);
    let mut accepted = 0usize;
    let mut termination = Termination::EndTime;
    let mut last_recorded = true;

    while t < config.t_end {
        if accepted >= config.max_steps {
            termination = Termination::MaxSteps;
            break;
        }
        let h_try = h.min(config.t_end - t);
        if h_try < config.min_step && t + h_try < config.t_end {
            termination = Termination::StepCollapse;
            break;
        }
        let (next, err) = match config.method {
            Method::Rk4 => (rk4_step(&f, &c, h_try), 0.0),
            Method::Rk45 => dp_step(&f, &c, h_try, config),
        };
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t: t + h_try });
        }
        let negative = next.iter().any(|&x| x < NEGATIVE_SLACK);
        if negative || err > 1.0 {
            h = if negative || config.method == Method::Rk4 {
                0.5 * h_try
            } else {
                h_try * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            };
            if h < config.min_step {
                termination = Termination::StepCollapse;
                break;
            }
            continue;
        }
        t = if h_try == config.t_end - t { config.t_end } else { t + h_try };
        c = next;
        accepted += 1;
        match config.method {
            Method::Rk4 => h = config.step,
            Method::Rk45 => {
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = h_try * factor;
            }
        }
        let done = converged(&c);
        last_recorded = false;
        if accepted.is_multiple_of(config.sample_every) || done || t >= config.t_end {
            traj.times.push(t);
            traj.states.push(c.clone());
            traj.monitors.push(monitor.sample(&c));
            last_recorded = true;
        }
        if done {
            termination = Termination::Converged;
            break;
        }
    }
    if !last_recorded {
        traj.times.push(t);
        traj.states.push(c.clone());
        traj.monitors.push(monitor.sample(&c));
    }
    Ok(Simulation {
        trajectory: traj,
        termination,
        birch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;

    const TRIANGLE: &str = "2 c1 <-> c1 + c2\n2 c1 <-> 2 c2\nc1 + c2 <-> 2 c2\n";

    #[test]
    fn triangle_rhs_forms_agree() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = [1.5, 2.0, 0.25, 3.0, 1.0, 4.0];
        let c = [0.7, 1.3];
        let a = mass_action_rhs(&net, &r, &c).unwrap();
        let b = reversible_pair_rhs(&net, &r, &c).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        // the triangle's right-hand side always sums to zero (c1 + c2 is conserved)
        assert!((a[0] + a[1]).abs() < 1e-12);
    }

    #[test]
    fn detailed_rhs_hand_expansion() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let v = detailed_rhs(&net, &[1.0, 1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(v, vec![-9.0, 9.0]);
        assert_eq!(detailed_rhs(&net, &[2.0, 4.0], &[0.5, 0.25]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn detailed_rhs_requires_reversibility() {
        let net = parse_network("A -> B").unwrap().network;
        assert_eq!(detailed_rhs(&net, &[1.0, 1.0], &[1.0, 1.0]), Err(Error::NotReversible(1)));
    }

    #[test]
    fn boundary_distance_cases() {
        let net = parse_network("A <-> 0\nB <-> 0").unwrap().network;
        let p = InvariantPolyhedron::new(&net, &[1.0, 1.0]);
        assert!((p.boundary_distance(&[1.0, 1.0]) - 1.0).abs() < 1e-15);
        assert_eq!(p.boundary_distance(&[0.0, 3.0]), 0.0);
    }

    #[test]
    fn triangle_converges_to_birch_point() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = RateAssignment::uniform(&net, 1);
        let cfg = IntegratorConfig {
            convergence_tol: Some(1e-7),
            ..Default::default()
        };
        let sim = simulate(&net, &r, &[2.0, 0.5], &cfg).unwrap();
        assert_eq!(sim.termination, Termination::Converged);
        let last = sim.trajectory.last_state();
        assert!((last[0] - 1.25).abs() < 1e-7 && (last[1] - 1.25).abs() < 1e-7);
        for m in &sim.trajectory.monitors {
            assert!(m.conservation_drift <= 1e-8);
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = RateAssignment::uniform(&net, 1);
        let cfg = IntegratorConfig {
            step: 0.0,
            ..Default::default()
        };
        assert!(matches!(simulate(&net, &r, &[1.0, 1.0], &cfg), Err(Error::InvalidConfig(_))));
    }
}
