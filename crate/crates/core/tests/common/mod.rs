#![allow(dead_code)]

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_crn::{Complex, Edge, ReactionNetwork};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    q(rng.gen_range(1..=12), rng.gen_range(1..=7))
}

fn species(s: usize) -> Vec<String> {
    (1..=s).map(|k| format!("x{k}")).collect()
}

/// `n` distinct exponent vectors with entries in `0..=2`.
pub fn distinct_complexes<R: Rng>(rng: &mut R, s: usize, n: usize) -> Vec<Complex> {
    let total = 3usize.pow(s as u32);
    assert!(n <= total);
    let mut codes: Vec<usize> = (0..total).collect();
    codes.shuffle(rng);
    codes[..n]
        .iter()
        .map(|&c| Complex((0..s).map(|k| ((c / 3usize.pow(k as u32)) % 3) as u32).collect()))
        .collect()
}

/// Arbitrary digraph on random complexes; every node has at least one edge.
pub fn random_network<R: Rng>(rng: &mut R, max_n: usize) -> ReactionNetwork {
    let s = rng.gen_range(1..=3);
    let n = rng.gen_range(2..=max_n.min(3usize.pow(s as u32)));
    let complexes = distinct_complexes(rng, s, n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(0.3) {
                edges.push(Edge::new(i, j));
            }
        }
    }
    for i in 0..n {
        if !edges.iter().any(|e| e.source == i || e.target == i) {
            let j = (i + 1) % n;
            edges.push(Edge::new(i, j));
        }
    }
    ReactionNetwork::new(species(s), complexes, edges).unwrap()
}

/// One linkage class, strongly connected: a Hamiltonian cycle in random order
/// plus random chords.
pub fn random_strongly_connected<R: Rng>(rng: &mut R, max_n: usize) -> ReactionNetwork {
    let s = rng.gen_range(1..=3);
    let n = rng.gen_range(2..=max_n.min(3usize.pow(s as u32)));
    let complexes = distinct_complexes(rng, s, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<Edge> = (0..n).map(|k| Edge::new(order[k], order[(k + 1) % n])).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && !edges.contains(&Edge::new(i, j)) && rng.gen_bool(0.35) {
                edges.push(Edge::new(i, j));
            }
        }
    }
    ReactionNetwork::new(species(s), complexes, edges).unwrap()
}

/// Random undirected graph with every edge present in both directions.
pub fn random_reversible<R: Rng>(rng: &mut R, max_n: usize) -> ReactionNetwork {
    let s = rng.gen_range(1..=3);
    let n = rng.gen_range(2..=max_n.min(3usize.pow(s as u32)));
    let complexes = distinct_complexes(rng, s, n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.45) {
                edges.push(Edge::new(i, j));
                edges.push(Edge::new(j, i));
            }
        }
    }
    if edges.is_empty() {
        edges.push(Edge::new(0, 1));
        edges.push(Edge::new(1, 0));
    }
    ReactionNetwork::new(species(s), complexes, edges).unwrap()
}

pub fn random_rates<R: Rng>(rng: &mut R, net: &ReactionNetwork) -> Vec<BigRational> {
    (0..net.edges().len()).map(|_| random_rational(rng)).collect()
}

/// Rates that are detailed balancing by construction:
/// `κ_ij = μ_ij L^{y_i}`, `κ_ji = μ_ij L^{y_j}` with rational `L`.
pub fn detailed_rates<R: Rng>(rng: &mut R, net: &ReactionNetwork) -> Vec<BigRational> {
    let l: Vec<BigRational> = (0..net.s()).map(|_| random_rational(rng)).collect();
    let pow = |y: &Complex| {
        y.0.iter()
            .zip(&l)
            .fold(q(1, 1), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize))
    };
    let mut rates = vec![q(0, 1); net.edges().len()];
    for (k, e) in net.edges().iter().enumerate() {
        if rates[k] != q(0, 1) {
            continue;
        }
        let back = net.edge_index(e.target, e.source).expect("reversible");
        let mu = random_rational(rng);
        rates[k] = &mu * pow(&net.complexes()[e.source]);
        rates[back] = mu * pow(&net.complexes()[e.target]);
    }
    rates
}

/// Whether every edge lies on a directed cycle, by plain depth-first search.
pub fn brute_force_weakly_reversible(net: &ReactionNetwork) -> bool {
    let reaches = |from: usize, to: usize| {
        let mut seen = vec![false; net.n()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(net.edges().iter().filter(|e| e.source == v).map(|e| e.target));
        }
        false
    };
    net.edges().iter().all(|e| reaches(e.target, e.source))
}
