//! Strata of a detailed balancing system and Farkas certificates for faces of
//! the invariant polyhedron.
//!
//! With `L = 1/c*`, an acyclic orientation `E'` of the reversible pairs picks
//! out the stratum `{c : (L*c)^{y_i} > (L*c)^{y_j} for (i, j) in E'}`. When
//! the closure of a stratum meets the relative interior of a face
//! `F_I = {c_i = 0, i in I}`, some `α > 0` on `I` pairs non-negatively with
//! every oriented reaction vector. Otherwise a non-negative combination
//! `v = Σ λ_e (y_j - y_i)` with `v_I <= 0`, `v_I != 0` witnesses that no such
//! `α` exists.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::balancing::{reversible_pairing, scaling_vector, ReversiblePairing, ScalingVector};
use crate::birch::BirchConfig;
use crate::dynamics::{detailed_rhs, simulate, IntegratorConfig, InvariantPolyhedron};
use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::rates::RateAssignment;
use crate::simplex::{minimize, Constraint, LpOutcome, Relation};

/// Largest number of reversible pairs [`acyclic_orientations`] accepts.
pub const PAIR_LIMIT: usize = 20;

/// Relative tolerance under which two monomial values count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Tolerance of the inward-normal alignment check.
pub const NORMAL_TOL: f64 = 1e-9;

/// One directed edge per reversible pair, with no directed cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AcyclicOrientation {
    /// Chosen edge index for each pair, in [`reversible_pairing`] order.
    pub edges: Vec<usize>,
    /// Complexes ordered so every chosen edge points forward.
    pub topological_order: Vec<usize>,
}

impl AcyclicOrientation {
    /// `(source, target)` of every chosen edge.
    pub fn arcs(&self, net: &ReactionNetwork) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&e| (net.edges()[e].source, net.edges()[e].target))
            .collect()
    }

    /// Re-checks that the topological order is a permutation respected by
    /// every chosen edge.
    pub fn verify(&self, net: &ReactionNetwork) -> bool {
        let mut pos = vec![usize::MAX; net.n()];
        for (k, &v) in self.topological_order.iter().enumerate() {
            if v >= net.n() || pos[v] != usize::MAX {
                return false;
            }
            pos[v] = k;
        }
        self.topological_order.len() == net.n() && self.arcs(net).iter().all(|&(i, j)| pos[i] < pos[j])
    }
}

fn complete_pairing(net: &ReactionNetwork) -> Result<ReversiblePairing> {
    let pairing = reversible_pairing(net);
    if pairing.is_complete() {
        Ok(pairing)
    } else {
        Err(Error::NotReversible(pairing.leftover.len()))
    }
}

/// Kahn's algorithm, smallest index first. `None` on a cycle.
fn topological_order(n: usize, arcs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(i, j) in arcs {
        indegree[j] += 1;
        out[i].push(j);
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.insert(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Every acyclic orientation, ordered by the bit pattern of choices
/// (bit `k` set means pair `k` points from its larger to its smaller index).
pub fn acyclic_orientations(net: &ReactionNetwork) -> Result<Vec<AcyclicOrientation>> {
    let pairing = complete_pairing(net)?;
    let p = pairing.pairs.len();
    if p > PAIR_LIMIT {
        return Err(Error::TooManyPairs {
            pairs: p,
            limit: PAIR_LIMIT,
        });
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << p) {
        let edges: Vec<usize> = pairing
            .pairs
            .iter()
            .enumerate()
            .map(|(k, pr)| if mask >> k & 1 == 0 { pr.forward } else { pr.backward })
            .collect();
        let arcs: Vec<(usize, usize)> = edges
            .iter()
            .map(|&e| (net.edges()[e].source, net.edges()[e].target))
            .collect();
        if let Some(order) = topological_order(net.n(), &arcs) {
            out.push(AcyclicOrientation {
                edges,
                topological_order: order,
            });
        }
    }
    Ok(out)
}

/// Where a point sits relative to the strata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumLocation {
    /// Orientation by strict inequality. Tied pairs are oriented by a
    /// consistent total order (value, then complex index), so `c` lies in the
    /// closure of the region this orientation describes.
    pub orientation: AcyclicOrientation,
    /// Pair indices whose monomials tie within [`TIE_TOL`].
    pub ties: Vec<usize>,
    /// `(L*c)^{y_i}` for each complex.
    pub monomials: Vec<f64>,
}

impl StratumLocation {
    pub fn is_interior(&self) -> bool {
        self.ties.is_empty()
    }
}

/// Classifies `c >= 0` by the signs of `(L*c)^{y_i} - (L*c)^{y_j}`.
pub fn stratum_of(net: &ReactionNetwork, l: &[f64], c: &[f64]) -> Result<StratumLocation> {
    for v in [l, c] {
        if v.len() != net.s() {
            return Err(Error::LengthMismatch {
                expected: net.s(),
                got: v.len(),
            });
        }
    }
    if l.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::InvalidConfig("scaling vector must be positive".into()));
    }
    if c.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::NegativeConcentration);
    }
    let pairing = complete_pairing(net)?;
    let lc: Vec<f64> = l.iter().zip(c).map(|(a, b)| a * b).collect();
    let values: Vec<f64> = net.complexes().iter().map(|y| y.monomial(&lc)).collect();

    let mut order: Vec<usize> = (0..net.n()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut pos = vec![0; net.n()];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }

    let mut ties = Vec::new();
    let edges = pairing
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (a, b) = (values[p.i], values[p.j]);
            if (a - b).abs() <= TIE_TOL * a.abs().max(b.abs()) {
                ties.push(k);
            }
            if pos[p.i] < pos[p.j] {
                p.forward
            } else {
                p.backward
            }
        })
        .collect();
    Ok(StratumLocation {
        orientation: AcyclicOrientation {
            edges,
            topological_order: order,
        },
        ties,
        monomials: values,
    })
}

/// Exact `α >= 1` on `I` (zero elsewhere) with `(y_j - y_i)·α >= 0` on every
/// oriented edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    /// 0-based species indices, sorted.
    pub face: Vec<usize>,
    /// Length `s`, zero off the face.
    pub alpha: Vec<BigRational>,
    /// `(y_j - y_i)·α` for each oriented edge.
    pub slacks: Vec<BigRational>,
}

/// Exact `λ >= 0` over the oriented edges such that `v = Σ λ_e (y_j - y_i)`
/// has `v_k <= 0` for all `k` in `I` and `v_k < 0` for some.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub face: Vec<usize>,
    pub lambda: Vec<BigRational>,
    pub v: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FarkasOutcome {
    Feasible(FarkasCertificate),
    Infeasible(DualCertificate),
}

impl FarkasOutcome {
    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            FarkasOutcome::Feasible(c) => Some(c),
            FarkasOutcome::Infeasible(_) => None,
        }
    }

    pub fn verify(&self, net: &ReactionNetwork, orientation: &AcyclicOrientation) -> bool {
        match self {
            FarkasOutcome::Feasible(c) => c.verify(net, orientation),
            FarkasOutcome::Infeasible(d) => d.verify(net, orientation),
        }
    }
}

fn oriented_vectors(net: &ReactionNetwork, orientation: &AcyclicOrientation) -> Vec<Vec<BigRational>> {
    orientation
        .edges
        .iter()
        .map(|&e| {
            net.reaction_vector(&net.edges()[e])
                .into_iter()
                .map(|x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

impl FarkasCertificate {
    /// Independent re-check of every defining inequality.
    pub fn verify(&self, net: &ReactionNetwork, orientation: &AcyclicOrientation) -> bool {
        let one = BigRational::one();
        let on_face = |k: usize| self.face.binary_search(&k).is_ok();
        self.alpha.len() == net.s()
            && self
                .alpha
                .iter()
                .enumerate()
                .all(|(k, a)| if on_face(k) { *a >= one } else { a.is_zero() })
            && oriented_vectors(net, orientation)
                .iter()
                .zip(&self.slacks)
                .all(|(d, s)| dot(d, &self.alpha) == *s && !s.is_negative())
            && self.slacks.len() == orientation.edges.len()
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(rational_to_f64).collect()
    }
}

impl DualCertificate {
    pub fn verify(&self, net: &ReactionNetwork, orientation: &AcyclicOrientation) -> bool {
        if self.lambda.len() != orientation.edges.len() || self.lambda.iter().any(|x| x.is_negative()) {
            return false;
        }
        let mut v = vec![BigRational::zero(); net.s()];
        for (d, lam) in oriented_vectors(net, orientation).iter().zip(&self.lambda) {
            for (vk, dk) in v.iter_mut().zip(d) {
                *vk = &*vk + lam * dk;
            }
        }
        v == self.v
            && self.face.iter().all(|&k| !v[k].is_positive())
            && self.face.iter().any(|&k| v[k].is_negative())
    }
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    crate::scalar::Scalar::to_f64(x)
}

fn normalize_face(net: &ReactionNetwork, face: &[usize]) -> Result<Vec<usize>> {
    if face.is_empty() {
        return Err(Error::EmptyFace);
    }
    if let Some(&k) = face.iter().find(|&&k| k >= net.s()) {
        return Err(Error::FaceIndexOutOfRange {
            index: k + 1,
            species: net.s(),
        });
    }
    let mut f = face.to_vec();
    f.sort_unstable();
    f.dedup();
    Ok(f)
}

/// Solves for a Farkas vector on face `I` (0-based species indices), or the
/// dual certificate when none exists. Both outcomes are re-verified.
pub fn farkas_vector(net: &ReactionNetwork, orientation: &AcyclicOrientation, face: &[usize]) -> Result<FarkasOutcome> {
    let face = normalize_face(net, face)?;
    let vectors = oriented_vectors(net, orientation);
    let q = |x: i64| BigRational::from_integer(x.into());
    let m = face.len();

    // Primal: α_I >= 1, D_I α_I >= 0; minimize Σ α for a canonical answer.
    let mut cons: Vec<Constraint> = (0..m)
        .map(|k| Constraint {
            coeffs: (0..m).map(|t| q((t == k) as i64)).collect(),
            relation: Relation::Ge,
            rhs: q(1),
        })
        .collect();
    cons.extend(vectors.iter().map(|d| Constraint {
        coeffs: face.iter().map(|&k| d[k].clone()).collect(),
        relation: Relation::Ge,
        rhs: q(0),
    }));
    if let LpOutcome::Optimal { x, .. } = minimize(m, &cons, &vec![q(1); m]) {
        let mut alpha = vec![q(0); net.s()];
        for (&k, a) in face.iter().zip(x) {
            alpha[k] = a;
        }
        let slacks = vectors.iter().map(|d| dot(d, &alpha)).collect();
        let cert = FarkasOutcome::Feasible(FarkasCertificate { face, alpha, slacks });
        debug_assert!(cert.verify(net, orientation));
        return Ok(cert);
    }

    // Dual: λ >= 0 with (D^T λ)_k <= 0 on I and Σ_I (D^T λ)_k <= -1.
    let e = vectors.len();
    let mut cons: Vec<Constraint> = face
        .iter()
        .map(|&k| Constraint {
            coeffs: vectors.iter().map(|d| d[k].clone()).collect(),
            relation: Relation::Le,
            rhs: q(0),
        })
        .collect();
    cons.push(Constraint {
        coeffs: vectors
            .iter()
            .map(|d| face.iter().fold(q(0), |acc, &k| acc + &d[k]))
            .collect(),
        relation: Relation::Le,
        rhs: q(-1),
    });
    match minimize(e, &cons, &vec![q(1); e]) {
        LpOutcome::Optimal { x: lambda, .. } => {
            let mut v = vec![q(0); net.s()];
            for (d, lam) in vectors.iter().zip(&lambda) {
                for (vk, dk) in v.iter_mut().zip(d) {
                    *vk = &*vk + lam * dk;
                }
            }
            let out = FarkasOutcome::Infeasible(DualCertificate { face, lambda, v });
            if out.verify(net, orientation) {
                Ok(out)
            } else {
                Err(Error::InvalidNetwork("dual certificate failed verification".into()))
            }
        }
        _ => Err(Error::InvalidNetwork(
            "neither a Farkas vector nor a dual certificate was found".into(),
        )),
    }
}

/// Minimum of `⟨α, detailed_rhs(c)⟩` over sampled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentReport {
    /// `None` when no sample had a certificate.
    pub minimum: Option<f64>,
    pub evaluated: usize,
    /// Indices of samples whose orientation admits no Farkas vector on the
    /// face; these are skipped.
    pub missing_certificate: Vec<usize>,
}

pub fn descent_check(net: &ReactionNetwork, l: &[f64], samples: &[Vec<f64>], face: &[usize]) -> Result<DescentReport> {
    let face = normalize_face(net, face)?;
    let mut cache: BTreeMap<Vec<usize>, Option<Vec<f64>>> = BTreeMap::new();
    let mut minimum: Option<f64> = None;
    let mut evaluated = 0;
    let mut missing = Vec::new();
    for (k, c) in samples.iter().enumerate() {
        let clipped: Vec<f64> = c.iter().map(|&x| x.max(0.0)).collect();
        let loc = stratum_of(net, l, &clipped)?;
        let alpha = match cache.get(&loc.orientation.edges) {
            Some(a) => a.clone(),
            None => {
                let a = farkas_vector(net, &loc.orientation, &face)?
                    .certificate()
                    .map(FarkasCertificate::alpha_f64);
                cache.insert(loc.orientation.edges.clone(), a.clone());
                a
            }
        };
        let Some(alpha) = alpha else {
            missing.push(k);
            continue;
        };
        let v = detailed_rhs(net, l, &clipped)?;
        let ip: f64 = alpha.iter().zip(&v).map(|(a, b)| a * b).sum();
        minimum = Some(minimum.map_or(ip, |m| m.min(ip)));
        evaluated += 1;
    }
    Ok(DescentReport {
        minimum,
        evaluated,
        missing_certificate: missing,
    })
}

/// Alignment of a certificate's projection onto `S` with the inward normal of
/// its face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalAlignment {
    /// `⟨P_S α, n⟩` for the unit inward normal `n`.
    pub multiple: f64,
    /// `‖P_S α - multiple · n‖`.
    pub residual: f64,
    pub aligned: bool,
}

/// Unit inward normal (inside `S`) of the edge `F_I` of a polygon `P` with
/// `dim S = 2`. `None` if `S` is not 2-dimensional or the coordinates in `I`
/// do not cut out a single edge direction.
pub fn inward_normal(net: &ReactionNetwork, polyhedron: &InvariantPolyhedron, face: &[usize]) -> Result<Option<Vec<f64>>> {
    let face = normalize_face(net, face)?;
    if polyhedron.dim() != 2 {
        return Ok(None);
    }
    let normals: Vec<DVector<f64>> = face
        .iter()
        .map(|&k| {
            let mut e = vec![0.0; net.s()];
            e[k] = 1.0;
            DVector::from_vec(polyhedron.project(&e))
        })
        .collect();
    let first = &normals[0];
    if first.norm() <= NORMAL_TOL {
        return Ok(None);
    }
    let unit = first / first.norm();
    let parallel = normals.iter().all(|v| {
        let m = v.dot(&unit);
        m > 0.0 && (v - m * &unit).norm() <= NORMAL_TOL * v.norm().max(1.0)
    });
    Ok(parallel.then(|| unit.iter().copied().collect()))
}

pub fn normal_alignment(
    net: &ReactionNetwork,
    polyhedron: &InvariantPolyhedron,
    certificate: &FarkasCertificate,
) -> Result<Option<NormalAlignment>> {
    let Some(n) = inward_normal(net, polyhedron, &certificate.face)? else {
        return Ok(None);
    };
    let p = DVector::from_vec(polyhedron.project(&certificate.alpha_f64()));
    let n = DVector::from_vec(n);
    let multiple = p.dot(&n);
    let residual = (&p - multiple * &n).norm();
    let scale = p.norm().max(1.0);
    Ok(Some(NormalAlignment {
        multiple,
        residual,
        aligned: multiple >= -NORMAL_TOL * scale && residual <= NORMAL_TOL * scale,
    }))
}

/// Orientations, certificates and descent over a simulated trajectory for one
/// face of `P`.
#[derive(Debug, Clone)]
pub struct StrataAnalysis {
    pub scaling: ScalingVector,
    pub face: Vec<usize>,
    pub orientations: Vec<AcyclicOrientation>,
    /// One outcome per orientation.
    pub certificates: Vec<FarkasOutcome>,
    pub descent: DescentReport,
}

pub fn analyze_strata(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    c0: &[f64],
    face: &[usize],
    integrator: &IntegratorConfig,
) -> Result<StrataAnalysis> {
    let face = normalize_face(net, face)?;
    let scaling = scaling_vector(net, rates, c0, &BirchConfig::default())?;
    let orientations = acyclic_orientations(net)?;
    let certificates = orientations
        .iter()
        .map(|o| farkas_vector(net, o, &face))
        .collect::<Result<Vec<_>>>()?;
    let sim = simulate(net, rates, c0, integrator)?;
    let descent = descent_check(net, &scaling.values, &sim.trajectory.states, &face)?;
    Ok(StrataAnalysis {
        scaling,
        face,
        orientations,
        certificates,
        descent,
    })
}
