//! Cayley matrix of a network and the complex-balancing (toric moduli) test.
//!
//! For positive tree constants `K`, the rates are complex balancing exactly
//! when `K^{u+} = K^{u-}` for every `u` in the integer kernel of the Cayley
//! matrix. Checking a basis of a finite-index sublattice suffices: if `d·v`
//! lies in the sublattice then `(K^v)^d = 1`, and positive reals have unique
//! positive `d`-th roots.

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::network::ReactionNetwork;
use crate::tree::tree_constants_minor;

/// `(s + l) × n` integer matrix. Column `j` is `y_j` stacked on the indicator
/// of the linkage class of complex `j`. Columns keep the network's complex
/// order; grouping them by class would only permute columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CayleyMatrix {
    pub rows: Vec<Vec<i64>>,
    pub species_rows: usize,
    pub class_rows: usize,
    pub cols: usize,
}

impl CayleyMatrix {
    pub fn rank(&self) -> usize {
        exact::rank(&self.rows, self.cols)
    }

    pub fn apply(&self, u: &[i64]) -> Vec<i64> {
        exact::mat_vec(&self.rows, u)
    }
}

/// Integer vectors spanning a finite-index sublattice of an integer kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LatticeBasis {
    pub vectors: Vec<Vec<i64>>,
}

impl LatticeBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Split of an integer vector `u = u+ - u-` into the binomial `K^{u+} - K^{u-}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binomial {
    pub u_plus: Vec<u32>,
    pub u_minus: Vec<u32>,
}

impl Binomial {
    pub fn from_vector(u: &[i64]) -> Self {
        Self {
            u_plus: u.iter().map(|&x| x.max(0) as u32).collect(),
            u_minus: u.iter().map(|&x| (-x).max(0) as u32).collect(),
        }
    }

    /// E.g. `K1*K3 - K2^2` (1-based).
    pub fn render(&self, var: &str) -> String {
        let side = |e: &[u32]| {
            let terms: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| match p {
                    1 => format!("{var}{}", i + 1),
                    _ => format!("{var}{}^{p}", i + 1),
                })
                .collect();
            if terms.is_empty() {
                "1".to_string()
            } else {
                terms.join("*")
            }
        };
        format!("{} - {}", side(&self.u_plus), side(&self.u_minus))
    }
}

pub fn cayley_matrix(net: &ReactionNetwork) -> CayleyMatrix {
    let lc = net.linkage_classes();
    let (s, l, n) = (net.s(), lc.count(), net.n());
    let mut rows = vec![vec![0i64; n]; s + l];
    for (j, y) in net.complexes().iter().enumerate() {
        for (k, &e) in y.0.iter().enumerate() {
            rows[k][j] = e as i64;
        }
        rows[s + lc.class_of[j]][j] = 1;
    }
    CayleyMatrix {
        rows,
        species_rows: s,
        class_rows: l,
        cols: n,
    }
}

/// `[-I_s | Y-blocks ; 0 | indicators]`, an `(s + l) × (s + n)` matrix.
pub fn extended_cayley_matrix(net: &ReactionNetwork) -> CayleyMatrix {
    let cay = cayley_matrix(net);
    let s = net.s();
    let rows = cay
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut out: Vec<i64> = (0..s).map(|k| if k == r { -1 } else { 0 }).collect();
            out.extend_from_slice(row);
            out
        })
        .collect();
    CayleyMatrix {
        rows,
        species_rows: cay.species_rows,
        class_rows: cay.class_rows,
        cols: s + cay.cols,
    }
}

pub fn integer_kernel_basis(matrix: &CayleyMatrix) -> LatticeBasis {
    LatticeBasis {
        vectors: exact::integer_kernel(&matrix.rows, matrix.cols),
    }
}

/// Whether `K^{u+} - K^{u-}` lies in the moduli ideal, i.e. `Cay · u = 0`.
pub fn binomial_in_moduli(net: &ReactionNetwork, u: &[i64]) -> Result<bool> {
    if u.len() != net.n() {
        return Err(Error::LengthMismatch {
            expected: net.n(),
            got: u.len(),
        });
    }
    Ok(cayley_matrix(net).apply(u).iter().all(|&x| x == 0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolatedBinomial<T> {
    pub binomial: Binomial,
    pub lhs: T,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipDecision<T> {
    pub balanced: bool,
    pub kernel_dim: usize,
    /// Empty when the network is not weakly reversible.
    pub tree_constants: Vec<T>,
    /// The kernel basis that was checked (all satisfied when balanced).
    pub basis: LatticeBasis,
    pub violated: Option<ViolatedBinomial<T>>,
    pub weakly_reversible: bool,
}

fn monomial_exact(k: &[BigRational], e: &[u32]) -> BigRational {
    k.iter()
        .zip(e)
        .filter(|(_, &p)| p > 0)
        .fold(BigRational::one(), |acc, (x, &p)| acc * num_traits::pow(x.clone(), p as usize))
}

/// Exact decision of complex balancing for rational rates.
pub fn moduli_membership_exact(net: &ReactionNetwork, rates: &[BigRational]) -> Result<MembershipDecision<BigRational>> {
    let basis = integer_kernel_basis(&cayley_matrix(net));
    let kernel_dim = basis.dim();
    if !net.is_weakly_reversible() {
        crate::rates::check_domain(net, rates)?;
        return Ok(MembershipDecision {
            balanced: false,
            kernel_dim,
            tree_constants: Vec::new(),
            basis,
            violated: None,
            weakly_reversible: false,
        });
    }
    let k = tree_constants_minor(net, rates)?.values;
    debug_assert!(k.iter().all(|x| x.is_positive()));
    let violated = basis.vectors.iter().find_map(|b| {
        let binomial = Binomial::from_vector(b);
        let lhs = monomial_exact(&k, &binomial.u_plus);
        let rhs = monomial_exact(&k, &binomial.u_minus);
        (lhs != rhs).then_some(ViolatedBinomial { binomial, lhs, rhs })
    });
    Ok(MembershipDecision {
        balanced: violated.is_none(),
        kernel_dim,
        tree_constants: k,
        basis,
        violated,
        weakly_reversible: true,
    })
}

/// Floating-point variant: a binomial counts as satisfied when
/// `|log K^{u+} - log K^{u-}| <= tol`.
pub fn moduli_membership_float(net: &ReactionNetwork, rates: &[f64], tol: f64) -> Result<MembershipDecision<f64>> {
    let basis = integer_kernel_basis(&cayley_matrix(net));
    let kernel_dim = basis.dim();
    if !net.is_weakly_reversible() {
        crate::rates::check_domain(net, rates)?;
        return Ok(MembershipDecision {
            balanced: false,
            kernel_dim,
            tree_constants: Vec::new(),
            basis,
            violated: None,
            weakly_reversible: false,
        });
    }
    let k = tree_constants_minor(net, rates)?.values;
    let violated = basis.vectors.iter().find_map(|b| {
        let binomial = Binomial::from_vector(b);
        let log_gap: f64 = b.iter().zip(&k).map(|(&e, x)| e as f64 * x.ln()).sum();
        let lhs: f64 = binomial.u_plus.iter().zip(&k).map(|(&e, x)| x.powi(e as i32)).product();
        let rhs: f64 = binomial.u_minus.iter().zip(&k).map(|(&e, x)| x.powi(e as i32)).product();
        (log_gap.abs() > tol).then_some(ViolatedBinomial { binomial, lhs, rhs })
    });
    Ok(MembershipDecision {
        balanced: violated.is_none(),
        kernel_dim,
        tree_constants: k,
        basis,
        violated,
        weakly_reversible: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;

    const TRIANGLE: &str = "2 c1 <-> c1 + c2\n2 c1 <-> 2 c2\nc1 + c2 <-> 2 c2\n";

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn triangle_cayley() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let cay = cayley_matrix(&net);
        assert_eq!(cay.rows, vec![vec![2, 1, 0], vec![0, 1, 2], vec![1, 1, 1]]);
        assert_eq!(cay.rank(), 2);
        assert_eq!(integer_kernel_basis(&cay).vectors, vec![vec![1, -2, 1]]);
    }

    #[test]
    fn triangle_binomials() {
        let net = parse_network(TRIANGLE).unwrap().network;
        assert!(!binomial_in_moduli(&net, &[1, 0, -1]).unwrap());
        assert!(binomial_in_moduli(&net, &[1, -2, 1]).unwrap());
        assert!(binomial_in_moduli(&net, &[1, 0]).is_err());
        assert_eq!(Binomial::from_vector(&[1, -2, 1]).render("K"), "K1*K3 - K2^2");
    }

    #[test]
    fn extended_cayley_kernel_dimension() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let ext = extended_cayley_matrix(&net);
        // the -I_s block makes the rank s + l, so the kernel has dimension n - l
        assert_eq!(ext.rank(), 2 + 1);
        assert_eq!(integer_kernel_basis(&ext).dim(), 3 - 1);
    }

    #[test]
    fn all_ones_triangle_is_balanced() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let d = moduli_membership_exact(&net, &vec![q(1); 6]).unwrap();
        assert!(d.balanced);
        assert_eq!(d.tree_constants, vec![q(3); 3]);
    }

    #[test]
    fn non_weakly_reversible_is_never_balanced() {
        let net = parse_network("A -> B ; k=1").unwrap().network;
        let d = moduli_membership_exact(&net, &[q(1)]).unwrap();
        assert!(!d.balanced);
        assert!(!d.weakly_reversible);
    }

    #[test]
    fn float_decision_matches_exact_on_violation() {
        let net = parse_network(TRIANGLE).unwrap().network;
        // κ12 = 2, others 1
        let mut r = vec![1.0; 6];
        r[0] = 2.0;
        let d = moduli_membership_float(&net, &r, 1e-12).unwrap();
        let mut rq = vec![q(1); 6];
        rq[0] = q(2);
        let e = moduli_membership_exact(&net, &rq).unwrap();
        assert_eq!(d.balanced, e.balanced);
    }
}
