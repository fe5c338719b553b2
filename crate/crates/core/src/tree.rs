//! Tree constants `K_i`: sums over spanning in-trees rooted at `i` of the
//! product of their edge rates.
//!
//! Two independent routes are provided. [`tree_constants_minor`] takes signed
//! principal minors of each linkage class block of `A_κ` (Matrix-Tree).
//! [`tree_constants_enumerated`] lists every in-tree and sums the monomials,
//! and is meant as an oracle on small classes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::rates::{check_domain, laplacian};
use crate::scalar::Scalar;

/// Default limit on the class size accepted by the enumeration oracle.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeConstants<T> {
    pub values: Vec<T>,
    /// Linkage class of each complex.
    pub class_of: Vec<usize>,
    /// Whether each complex's class is strongly connected. When it is not,
    /// the values are still reported but carry no balancing meaning.
    pub reversible_class: Vec<bool>,
}

/// A spanning tree of one linkage class with every edge directed toward `sink`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ITree {
    pub sink: usize,
    /// Indices into [`ReactionNetwork::edges`], sorted.
    pub edges: Vec<usize>,
}

pub fn tree_constants_minor<T: Scalar>(net: &ReactionNetwork, rates: &[T]) -> Result<TreeConstants<T>> {
    let a = laplacian(net, rates)?;
    let lc = net.linkage_classes();
    let wr = net.weak_reversibility();
    let mut values = vec![T::zero(); net.n()];
    for class in &lc.classes {
        let nc = class.len();
        for &i in class {
            let minor: Vec<Vec<T>> = class
                .iter()
                .filter(|&&r| r != i)
                .map(|&r| {
                    class
                        .iter()
                        .filter(|&&c| c != i)
                        .map(|&c| a[r][c].clone())
                        .collect()
                })
                .collect();
            let det = T::determinant(minor);
            values[i] = if (nc - 1) % 2 == 0 { det } else { -det };
        }
    }
    Ok(TreeConstants {
        values,
        reversible_class: lc.class_of.iter().map(|&c| wr.per_class[c]).collect(),
        class_of: lc.class_of,
    })
}

/// Every spanning in-tree of the linkage class of `sink`.
///
/// Each non-sink node picks one outgoing edge inside the class; the choice is
/// an in-tree exactly when following the picks from any node reaches `sink`.
pub fn enumerate_i_trees(net: &ReactionNetwork, sink: usize, limit: usize) -> Result<Vec<ITree>> {
    let lc = net.linkage_classes();
    let class = &lc.classes[lc.class_of[sink]];
    if class.len() > limit {
        return Err(Error::ClassTooLarge {
            index: sink + 1,
            size: class.len(),
            limit,
        });
    }
    let others: Vec<usize> = class.iter().copied().filter(|&v| v != sink).collect();
    let out_edges: Vec<Vec<usize>> = others
        .iter()
        .map(|&v| {
            net.edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.source == v)
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    if out_edges.iter().any(|o| o.is_empty()) {
        return Ok(Vec::new());
    }

    let mut trees = Vec::new();
    let mut choice = vec![0usize; others.len()];
    let mut next = vec![usize::MAX; net.n()];
    loop {
        for (k, &v) in others.iter().enumerate() {
            next[v] = net.edges()[out_edges[k][choice[k]]].target;
        }
        let reaches_sink = others.iter().all(|&start| {
            let mut v = start;
            for _ in 0..others.len() {
                if v == sink {
                    return true;
                }
                v = next[v];
            }
            v == sink
        });
        if reaches_sink {
            let mut edges: Vec<usize> = (0..others.len()).map(|k| out_edges[k][choice[k]]).collect();
            edges.sort_unstable();
            trees.push(ITree { sink, edges });
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == others.len() {
                trees.sort();
                return Ok(trees);
            }
            choice[k] += 1;
            if choice[k] < out_edges[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

pub fn tree_constants_enumerated<T: Scalar>(
    net: &ReactionNetwork,
    rates: &[T],
    limit: usize,
) -> Result<TreeConstants<T>> {
    check_domain(net, rates)?;
    let lc = net.linkage_classes();
    let wr = net.weak_reversibility();
    let values = (0..net.n())
        .map(|i| {
            let trees = enumerate_i_trees(net, i, limit)?;
            Ok(trees.iter().fold(T::zero(), |acc, t| {
                acc + t.edges.iter().fold(T::one(), |p, &e| p * rates[e].clone())
            }))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(TreeConstants {
        values,
        reversible_class: lc.class_of.iter().map(|&c| wr.per_class[c]).collect(),
        class_of: lc.class_of,
    })
}

/// Number of monomials (i-trees) in each `K_i`.
pub fn monomial_counts(net: &ReactionNetwork, limit: usize) -> Result<Vec<usize>> {
    (0..net.n())
        .map(|i| enumerate_i_trees(net, i, limit).map(|t| t.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    const TRIANGLE: &str = "2 c1 <-> c1 + c2\n2 c1 <-> 2 c2\nc1 + c2 <-> 2 c2\n";

    #[test]
    fn reversible_pair() {
        let net = parse_network("A <-> B").unwrap().network;
        let k = tree_constants_minor(&net, &[q(5), q(7)]).unwrap();
        // K_1 = κ21, K_2 = κ12
        assert_eq!(k.values, vec![q(7), q(5)]);
        let trees = enumerate_i_trees(&net, 0, 8).unwrap();
        assert_eq!(trees, vec![ITree { sink: 0, edges: vec![1] }]);
    }

    #[test]
    fn triangle_all_ones() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let ones = vec![q(1); 6];
        assert_eq!(tree_constants_minor(&net, &ones).unwrap().values, vec![q(3); 3]);
        assert_eq!(tree_constants_enumerated(&net, &ones, 8).unwrap().values, vec![q(3); 3]);
    }

    #[test]
    fn triangle_trees_of_node_one() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let trees = enumerate_i_trees(&net, 0, 8).unwrap();
        let as_pairs: Vec<Vec<(usize, usize)>> = trees
            .iter()
            .map(|t| {
                let mut v: Vec<_> = t
                    .edges
                    .iter()
                    .map(|&e| (net.edges()[e].source + 1, net.edges()[e].target + 1))
                    .collect();
                v.sort();
                v
            })
            .collect();
        assert_eq!(as_pairs.len(), 3);
        for expected in [vec![(2, 1), (3, 1)], vec![(2, 1), (3, 2)], vec![(2, 3), (3, 1)]] {
            assert!(as_pairs.contains(&expected), "{expected:?} missing");
        }
    }

    #[test]
    fn dead_end_node_has_no_trees() {
        // 1 -> 2 only: node 1 cannot be reached from 2.
        let net = parse_network("A -> B").unwrap().network;
        assert!(enumerate_i_trees(&net, 0, 8).unwrap().is_empty());
        assert_eq!(enumerate_i_trees(&net, 1, 8).unwrap().len(), 1);
        let k = tree_constants_minor(&net, &[q(2)]).unwrap();
        assert_eq!(k.values, vec![q(0), q(2)]);
        assert_eq!(k.reversible_class, vec![false, false]);
    }

    #[test]
    fn enumeration_guard() {
        let net = parse_network(TRIANGLE).unwrap().network;
        assert!(matches!(
            enumerate_i_trees(&net, 0, 2),
            Err(Error::ClassTooLarge { size: 3, limit: 2, .. })
        ));
    }

    #[test]
    fn float_minor_agrees_with_exact() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = [1.5, 2.0, 0.25, 3.0, 1.0, 4.0];
        let fl = tree_constants_minor(&net, &r).unwrap();
        let ex = tree_constants_enumerated(&net, &r, 8).unwrap();
        for (a, b) in fl.values.iter().zip(&ex.values) {
            assert!((a - b).abs() < 1e-12 * b.abs());
        }
    }
}
