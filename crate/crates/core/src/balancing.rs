//! Detailed balancing, a particular positive steady state, and the scaling
//! vector `L`.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::birch::{birch_point, BirchConfig};
use crate::cayley::LatticeBasis;
use crate::error::{Error, Result};
use crate::exact;
use crate::network::ReactionNetwork;
use crate::rates::{check_domain, RateAssignment};
use crate::tree::tree_constants_minor;

/// Default tolerance on the normalized least-squares residual used when
/// building a particular steady state from logarithms.
pub const STEADY_STATE_TOL: f64 = 1e-9;

/// Reversible reaction `{i, j}` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReversiblePair {
    pub i: usize,
    pub j: usize,
    /// Edge index of `i -> j`.
    pub forward: usize,
    /// Edge index of `j -> i`.
    pub backward: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversiblePairing {
    pub pairs: Vec<ReversiblePair>,
    /// Edges whose reverse is missing.
    pub leftover: Vec<usize>,
}

impl ReversiblePairing {
    pub fn is_complete(&self) -> bool {
        self.leftover.is_empty()
    }
}

pub fn reversible_pairing(net: &ReactionNetwork) -> ReversiblePairing {
    let mut pairs = Vec::new();
    let mut leftover = Vec::new();
    for (k, e) in net.edges().iter().enumerate() {
        match net.edge_index(e.target, e.source) {
            Some(back) if e.source < e.target => pairs.push(ReversiblePair {
                i: e.source,
                j: e.target,
                forward: k,
                backward: back,
            }),
            Some(_) => {}
            None => leftover.push(k),
        }
    }
    pairs.sort_by_key(|p| (p.i, p.j));
    ReversiblePairing { pairs, leftover }
}

/// A circuit `λ` (integer relation `Σ λ_e (y_j - y_i) = 0`) whose rate product
/// `Π (κ_ij / κ_ji)^{λ_e}` differs from one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitViolation<T> {
    /// 1-based `(i, j)` of each pair with a non-zero exponent.
    pub pairs: Vec<(usize, usize)>,
    pub exponents: Vec<i64>,
    pub product: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetailedBalanceDecision<T> {
    pub detailed_balancing: bool,
    /// Set when the decision is negative for structural reasons.
    pub reason: Option<String>,
    pub pairing: ReversiblePairing,
    /// Integer basis of the circuits, one entry per pair.
    pub circuits: LatticeBasis,
    pub violated: Option<CircuitViolation<T>>,
}

fn circuit_basis(net: &ReactionNetwork, pairing: &ReversiblePairing) -> LatticeBasis {
    // columns are the reaction vectors y_j - y_i of each pair
    let s = net.s();
    let cols: Vec<Vec<i64>> = pairing
        .pairs
        .iter()
        .map(|p| net.reaction_vector(&net.edges()[p.forward]))
        .collect();
    let rows: Vec<Vec<i64>> = (0..s).map(|k| cols.iter().map(|c| c[k]).collect()).collect();
    LatticeBasis {
        vectors: exact::integer_kernel(&rows, pairing.pairs.len()),
    }
}

fn violation_pairs(pairing: &ReversiblePairing, lambda: &[i64]) -> (Vec<(usize, usize)>, Vec<i64>) {
    pairing
        .pairs
        .iter()
        .zip(lambda)
        .filter(|(_, &x)| x != 0)
        .map(|(p, &x)| ((p.i + 1, p.j + 1), x))
        .unzip()
}

fn not_reversible<T>(pairing: ReversiblePairing) -> DetailedBalanceDecision<T> {
    DetailedBalanceDecision {
        detailed_balancing: false,
        reason: Some(format!(
            "network is not reversible ({} one-directional edges)",
            pairing.leftover.len()
        )),
        pairing,
        circuits: LatticeBasis { vectors: Vec::new() },
        violated: None,
    }
}

/// Exact detailed-balancing decision: the log-ratio system
/// `log(κ_ij/κ_ji) = (y_j - y_i)·log c` is solvable iff every circuit product
/// equals one.
pub fn detailed_balancing_exact(
    net: &ReactionNetwork,
    rates: &[BigRational],
) -> Result<DetailedBalanceDecision<BigRational>> {
    check_domain(net, rates)?;
    let pairing = reversible_pairing(net);
    if !pairing.is_complete() {
        return Ok(not_reversible(pairing));
    }
    let circuits = circuit_basis(net, &pairing);
    let violated = circuits.vectors.iter().find_map(|lambda| {
        let product = pairing
            .pairs
            .iter()
            .zip(lambda)
            .fold(BigRational::one(), |acc, (p, &x)| {
                let ratio = &rates[p.forward] / &rates[p.backward];
                acc * num_traits::pow::Pow::pow(&ratio, x as i32)
            });
        (!product.is_one()).then(|| {
            let (pairs, exponents) = violation_pairs(&pairing, lambda);
            CircuitViolation {
                pairs,
                exponents,
                product,
            }
        })
    });
    Ok(DetailedBalanceDecision {
        detailed_balancing: violated.is_none(),
        reason: None,
        pairing,
        circuits,
        violated,
    })
}

/// Floating variant; a circuit passes when `|Σ λ_e log(κ_ij/κ_ji)| <= tol`.
pub fn detailed_balancing_float(net: &ReactionNetwork, rates: &[f64], tol: f64) -> Result<DetailedBalanceDecision<f64>> {
    check_domain(net, rates)?;
    let pairing = reversible_pairing(net);
    if !pairing.is_complete() {
        return Ok(not_reversible(pairing));
    }
    let circuits = circuit_basis(net, &pairing);
    let violated = circuits.vectors.iter().find_map(|lambda| {
        let log_product: f64 = pairing
            .pairs
            .iter()
            .zip(lambda)
            .map(|(p, &x)| x as f64 * (rates[p.forward] / rates[p.backward]).ln())
            .sum();
        (log_product.abs() > tol).then(|| {
            let (pairs, exponents) = violation_pairs(&pairing, lambda);
            CircuitViolation {
                pairs,
                exponents,
                product: log_product.exp(),
            }
        })
    });
    Ok(DetailedBalanceDecision {
        detailed_balancing: violated.is_none(),
        reason: None,
        pairing,
        circuits,
        violated,
    })
}

/// Detailed-balancing decision for an assignment: exact when every rate is
/// rational, otherwise in floating point with tolerance `tol`.
pub fn is_detailed_balancing(net: &ReactionNetwork, rates: &RateAssignment, tol: f64) -> Result<bool> {
    match rates.exact_values() {
        Some(q) => Ok(detailed_balancing_exact(net, &q)?.detailed_balancing),
        None => Ok(detailed_balancing_float(net, &rates.float_values(), tol)?.detailed_balancing),
    }
}

/// Tree constants as floats, computed exactly first when the rates allow it.
pub fn tree_constants_f64(net: &ReactionNetwork, rates: &RateAssignment) -> Result<Vec<f64>> {
    use crate::scalar::Scalar;
    Ok(match rates.exact_values() {
        Some(q) => tree_constants_minor(net, &q)?
            .values
            .iter()
            .map(Scalar::to_f64)
            .collect(),
        None => tree_constants_minor(net, &rates.float_values())?.values,
    })
}

/// Minimum-norm least-squares solution of `A x = b` and its residual norm.
pub(crate) fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    if a.nrows() == 0 || a.ncols() == 0 {
        return (DVector::zeros(a.ncols()), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let x = svd.solve(b, eps).expect("SVD computed with U and V");
    let r = (a * &x - b).norm();
    (x, r)
}

/// A positive `ĉ` with `Ψ(ĉ)·A_κ = 0`, from the log-linear system
/// `(y_j - y_i)·x = log K_j - log K_i` over all edges. The representative is
/// the minimum-norm `x`.
pub fn particular_steady_state(net: &ReactionNetwork, rates: &RateAssignment, tol: f64) -> Result<Vec<f64>> {
    if !net.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    let k = tree_constants_f64(net, rates)?;
    let log_k: Vec<f64> = k.iter().map(|x| x.ln()).collect();
    let m = net.edges().len();
    let s = net.s();
    let a = DMatrix::from_fn(m, s, |r, col| net.reaction_vector(&net.edges()[r])[col] as f64);
    let b = DVector::from_fn(m, |r, _| {
        let e = net.edges()[r];
        log_k[e.target] - log_k[e.source]
    });
    let (x, res) = min_norm_solve(&a, &b);
    let normalized = res / b.norm().max(1.0);
    if normalized.is_nan() || normalized > tol {
        return Err(Error::NotComplexBalancing { residual: normalized });
    }
    Ok(x.iter().map(|v| v.exp()).collect())
}

/// `L = 1 / c*` for a detailed balancing system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingVector {
    pub values: Vec<f64>,
    pub birch_point: Vec<f64>,
}

pub fn scaling_vector(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    c0: &[f64],
    config: &BirchConfig,
) -> Result<ScalingVector> {
    if !is_detailed_balancing(net, rates, config.balance_tol)? {
        return Err(Error::NotDetailedBalancing);
    }
    let bp = birch_point(net, rates, c0, config)?;
    Ok(ScalingVector {
        values: bp.c_star.iter().map(|x| 1.0 / x).collect(),
        birch_point: bp.c_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;

    const TRIANGLE: &str = "2 c1 <-> c1 + c2\n2 c1 <-> 2 c2\nc1 + c2 <-> 2 c2\n";

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pairing_of_triangle() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let p = reversible_pairing(&net);
        assert!(p.is_complete());
        let ij: Vec<_> = p.pairs.iter().map(|x| (x.i, x.j)).collect();
        assert_eq!(ij, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn single_reversible_reaction_is_always_detailed() {
        let net = parse_network("A + B <-> C").unwrap().network;
        let d = detailed_balancing_exact(&net, &[q(7, 3), q(2, 1)]).unwrap();
        assert!(d.detailed_balancing);
        assert_eq!(d.circuits.dim(), 0);
    }

    #[test]
    fn irreversible_network_is_rejected_with_reason() {
        let net = parse_network("A -> B").unwrap().network;
        let d = detailed_balancing_exact(&net, &[q(1, 1)]).unwrap();
        assert!(!d.detailed_balancing);
        assert!(d.reason.is_some());
    }

    #[test]
    fn triangle_all_ones_is_detailed() {
        let net = parse_network(TRIANGLE).unwrap().network;
        assert!(detailed_balancing_exact(&net, &vec![q(1, 1); 6]).unwrap().detailed_balancing);
    }

    #[test]
    fn complex_but_not_detailed_balanced_triangle() {
        // κ12 = 1/9, κ32 = 11/4, others 1: K1 K3 = K2^2 but κ12 κ32 != κ21 κ23
        let net = parse_network(TRIANGLE).unwrap().network;
        let mut r = vec![q(1, 1); 6];
        r[0] = q(1, 9);
        r[5] = q(11, 4);
        assert!(crate::cayley::moduli_membership_exact(&net, &r).unwrap().balanced);
        let d = detailed_balancing_exact(&net, &r).unwrap();
        assert!(!d.detailed_balancing);
        assert!(d.violated.is_some());
    }

    #[test]
    fn particular_steady_state_of_triangle() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = RateAssignment::uniform(&net, 1);
        let c = particular_steady_state(&net, &r, STEADY_STATE_TOL).unwrap();
        // K = (3,3,3) gives a zero right-hand side, so the min-norm log is 0
        for x in &c {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn particular_steady_state_rejects_unbalanced() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let mut r = RateAssignment::uniform(&net, 1);
        r.set(0, crate::rates::Rate::Exact(q(2, 1))).unwrap();
        assert!(matches!(
            particular_steady_state(&net, &r, STEADY_STATE_TOL),
            Err(Error::NotComplexBalancing { .. })
        ));
    }
}
