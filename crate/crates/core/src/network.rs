//! Reaction network data model and structural analysis.
//!
//! Complexes are indexed `0..n` in first-appearance order and species
//! `0..s`. User-facing output (DSL, reports, rate files) numbers both from 1.

use std::collections::HashSet;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;

/// Exponent vector `y_i` of a complex (the monomial `c^{y_i}`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Complex(pub Vec<u32>);

impl Complex {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64).collect()
    }

    /// The monomial `c^y`, with `0^0 = 1`.
    pub fn monomial(&self, c: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(c)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }

    /// Renders the complex with the given species names, e.g. `2 A + B`.
    pub fn display<'a>(&'a self, species: &'a [String]) -> ComplexDisplay<'a> {
        ComplexDisplay {
            complex: self,
            species,
        }
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a Complex,
    species: &'a [String],
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complex.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &e) in self.complex.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", self.species[k])?;
            } else {
                write!(f, "{} {}", e, self.species[k])?;
            }
        }
        Ok(())
    }
}

/// Directed edge `source -> target` between complex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

impl Edge {
    pub fn new(source: usize, target: usize) -> Self {
        Self { source, target }
    }

    /// Rate-constant label `k<i>_<j>` (1-based).
    pub fn label(&self) -> String {
        format!("k{}_{}", self.source + 1, self.target + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    complexes: Vec<Complex>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkageClasses {
    /// Complex indices of each class, classes ordered by their smallest member.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl LinkageClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakReversibility {
    pub weakly_reversible: bool,
    /// One flag per linkage class: is the class strongly connected?
    pub per_class: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoichiometricSubspace {
    /// Primitive integer basis of `S`, rows of length `s`.
    pub basis: Vec<Vec<i64>>,
    pub sigma: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub species: Vec<String>,
    pub complexes: Vec<String>,
    /// 1-based `(source, target)` pairs.
    pub edges: Vec<(usize, usize)>,
    /// 1-based complex indices.
    pub linkage_classes: Vec<Vec<usize>>,
    pub l: usize,
    pub n: usize,
    pub s: usize,
    pub sigma: usize,
    pub delta: usize,
    pub weakly_reversible: bool,
    pub stoich_basis: Vec<Vec<i64>>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, complexes: Vec<Complex>, edges: Vec<Edge>) -> Result<Self> {
        let s = species.len();
        let mut seen_species = HashSet::new();
        for name in &species {
            if !seen_species.insert(name) {
                return Err(Error::InvalidNetwork(format!("species `{name}` listed twice")));
            }
        }
        let mut seen = HashSet::new();
        for (i, y) in complexes.iter().enumerate() {
            if y.0.len() != s {
                return Err(Error::InvalidNetwork(format!(
                    "complex {} has {} entries, expected {s}",
                    i + 1,
                    y.0.len()
                )));
            }
            if !seen.insert(y) {
                return Err(Error::InvalidNetwork(format!(
                    "complex {} duplicates an earlier complex",
                    i + 1
                )));
            }
        }
        let n = complexes.len();
        let mut seen_edges = HashSet::new();
        for e in &edges {
            if e.source >= n || e.target >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge {} -> {} refers to a missing complex",
                    e.source + 1,
                    e.target + 1
                )));
            }
            if e.source == e.target {
                return Err(Error::SelfLoop(e.source + 1));
            }
            if !seen_edges.insert(*e) {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate edge {} -> {}",
                    e.source + 1,
                    e.target + 1
                )));
            }
        }
        Ok(Self {
            species,
            complexes,
            edges,
        })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of complexes.
    pub fn n(&self) -> usize {
        self.complexes.len()
    }

    /// Number of species.
    pub fn s(&self) -> usize {
        self.species.len()
    }

    pub fn edge_index(&self, source: usize, target: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.source == source && e.target == target)
    }

    /// `y_target - y_source`.
    pub fn reaction_vector(&self, edge: &Edge) -> Vec<i64> {
        let a = &self.complexes[edge.source].0;
        let b = &self.complexes[edge.target].0;
        a.iter().zip(b).map(|(&x, &y)| y as i64 - x as i64).collect()
    }

    pub fn linkage_classes(&self) -> LinkageClasses {
        let n = self.n();
        let mut uf = UnionFind::<usize>::new(n);
        for e in &self.edges {
            uf.union(e.source, e.target);
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut root_class = vec![usize::MAX; n];
        let mut class_of = vec![0; n];
        for i in 0..n {
            let r = uf.find(i);
            if root_class[r] == usize::MAX {
                root_class[r] = classes.len();
                classes.push(Vec::new());
            }
            class_of[i] = root_class[r];
            classes[root_class[r]].push(i);
        }
        LinkageClasses { classes, class_of }
    }

    pub fn weak_reversibility(&self) -> WeakReversibility {
        let lc = self.linkage_classes();
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.n()).map(|_| g.add_node(())).collect();
        for e in &self.edges {
            g.add_edge(nodes[e.source], nodes[e.target], ());
        }
        let mut scc_of = vec![0; self.n()];
        for (k, comp) in tarjan_scc(&g).iter().enumerate() {
            for v in comp {
                scc_of[v.index()] = k;
            }
        }
        let per_class: Vec<bool> = lc
            .classes
            .iter()
            .map(|cls| cls.iter().all(|&i| scc_of[i] == scc_of[cls[0]]))
            .collect();
        WeakReversibility {
            weakly_reversible: per_class.iter().all(|&b| b),
            per_class,
        }
    }

    pub fn is_weakly_reversible(&self) -> bool {
        self.weak_reversibility().weakly_reversible
    }

    /// True when every edge has its reverse.
    pub fn is_reversible(&self) -> bool {
        self.edges
            .iter()
            .all(|e| self.edge_index(e.target, e.source).is_some())
    }

    pub fn reaction_vectors(&self) -> Vec<Vec<i64>> {
        self.edges.iter().map(|e| self.reaction_vector(e)).collect()
    }

    pub fn stoichiometric_subspace(&self) -> StoichiometricSubspace {
        let basis = exact::row_space_basis(&self.reaction_vectors(), self.s());
        StoichiometricSubspace {
            sigma: basis.len(),
            basis,
        }
    }

    /// `n - sigma - l`, which is never negative.
    pub fn deficiency(&self) -> usize {
        let n = self.n();
        let l = self.linkage_classes().count();
        let sigma = self.stoichiometric_subspace().sigma;
        n - sigma - l
    }

    pub fn structural_report(&self) -> StructuralReport {
        let lc = self.linkage_classes();
        let sub = self.stoichiometric_subspace();
        let l = lc.count();
        StructuralReport {
            species: self.species.clone(),
            complexes: self
                .complexes
                .iter()
                .map(|y| y.display(&self.species).to_string())
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.source + 1, e.target + 1))
                .collect(),
            linkage_classes: lc
                .classes
                .iter()
                .map(|c| c.iter().map(|i| i + 1).collect())
                .collect(),
            l,
            n: self.n(),
            s: self.s(),
            sigma: sub.sigma,
            delta: self.n() - sub.sigma - l,
            weakly_reversible: self.is_weakly_reversible(),
            stoich_basis: sub.basis,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(edges: &[(usize, usize)]) -> ReactionNetwork {
        ReactionNetwork::new(
            vec!["c1".into(), "c2".into()],
            vec![Complex(vec![2, 0]), Complex(vec![1, 1]), Complex(vec![0, 2])],
            edges.iter().map(|&(a, b)| Edge::new(a, b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn triangle_structure() {
        let net = triangle(&[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        assert_eq!(net.linkage_classes().count(), 1);
        assert!(net.is_weakly_reversible());
        assert_eq!(net.stoichiometric_subspace().basis, vec![vec![1, -1]]);
        assert_eq!(net.deficiency(), 1);
    }

    #[test]
    fn triangle_without_two_edges_is_not_weakly_reversible() {
        let net = triangle(&[(0, 2), (1, 0), (1, 2), (2, 0)]);
        let wr = net.weak_reversibility();
        assert!(!wr.weakly_reversible);
        assert_eq!(wr.per_class, vec![false]);
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let sp = vec!["A".to_string()];
        let cx = vec![Complex(vec![1]), Complex(vec![0])];
        assert_eq!(
            ReactionNetwork::new(sp.clone(), cx.clone(), vec![Edge::new(0, 0)]),
            Err(Error::SelfLoop(1))
        );
        assert!(ReactionNetwork::new(
            sp.clone(),
            cx.clone(),
            vec![Edge::new(0, 1), Edge::new(0, 1)]
        )
        .is_err());
        assert!(ReactionNetwork::new(sp, vec![Complex(vec![1]), Complex(vec![1])], vec![]).is_err());
    }

    #[test]
    fn zero_complex_displays_as_zero() {
        let sp = vec!["A".to_string(), "B".to_string()];
        assert_eq!(Complex(vec![0, 0]).display(&sp).to_string(), "0");
        assert_eq!(Complex(vec![2, 1]).display(&sp).to_string(), "2 A + B");
        assert_eq!(Complex(vec![0, 3]).monomial(&[0.0, 2.0]), 8.0);
    }
}
