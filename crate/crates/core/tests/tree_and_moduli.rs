mod common;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use toric_crn::cayley::{binomial_in_moduli, cayley_matrix, integer_kernel_basis, moduli_membership_exact};
use toric_crn::corpus::load_bundled;
use toric_crn::laplacian;
use toric_crn::tree::{monomial_counts, tree_constants_enumerated, tree_constants_minor};

use common::*;

/// Parses `K8 K11 K15 - K7 K12 K16` into an exponent vector of length 16.
fn binomial(text: &str) -> Vec<i64> {
    let mut u = vec![0i64; 16];
    let (plus, minus) = text.split_once('-').unwrap();
    for (side, sign) in [(plus, 1), (minus, -1)] {
        for t in side.split_whitespace() {
            let k: usize = t.trim_start_matches('K').parse().unwrap();
            u[k - 1] += sign;
        }
    }
    u
}

const RECOMBINATION_GENERATORS: [&str; 18] = [
    "K8 K11 K15 - K7 K12 K16",
    "K6 K9 K15 - K5 K10 K16",
    "K4 K11 K14 - K3 K12 K16",
    "K2 K9 K14 - K1 K10 K16",
    "K4 K7 K14 - K3 K8 K15",
    "K2 K5 K14 - K1 K6 K15",
    "K6 K12 K13 - K5 K11 K14",
    "K2 K12 K13 - K1 K11 K15",
    "K8 K10 K13 - K7 K9 K14",
    "K4 K10 K13 - K3 K9 K15",
    "K2 K8 K13 - K1 K7 K16",
    "K4 K6 K13 - K3 K5 K16",
    "K9 K11 K14 K15 - K10 K12 K13 K16",
    "K6 K8 K13 K15 - K5 K7 K14 K16",
    "K2 K4 K13 K14 - K1 K3 K15 K16",
    "K5 K8 K10 K11 - K6 K7 K9 K12",
    "K1 K4 K10 K11 - K2 K3 K9 K12",
    "K1 K4 K6 K7 - K2 K3 K5 K8",
];

#[test]
fn recombination_generators_lie_in_the_moduli_ideal() {
    let net = load_bundled("recombination").unwrap().network;
    let mut degrees = [0usize; 5];
    for g in RECOMBINATION_GENERATORS {
        let u = binomial(g);
        assert!(binomial_in_moduli(&net, &u).unwrap(), "{g}");
        degrees[u.iter().filter(|&&x| x > 0).count()] += 1;
    }
    assert_eq!(degrees[3], 12);
    assert_eq!(degrees[4], 6);
    assert_eq!(integer_kernel_basis(&cayley_matrix(&net)).dim(), 5);
    // a non-member: swapping one factor breaks the species balance
    assert!(!binomial_in_moduli(&net, &binomial("K8 K11 K15 - K7 K12 K13")).unwrap());
}

#[test]
fn recombination_marginal_constants_have_sixteen_trees() {
    let net = load_bundled("recombination").unwrap().network;
    let counts = monomial_counts(&net, 8).unwrap();
    assert_eq!(&counts[..12], &[1; 12]);
    assert_eq!(&counts[12..], &[16; 4]);
}

#[test]
fn perturbing_one_pair_rate_breaks_recombination_balance() {
    let parsed = load_bundled("recombination").unwrap();
    let net = &parsed.network;
    let mut rates = parsed.rates().unwrap().exact_values().unwrap();
    assert!(moduli_membership_exact(net, &rates).unwrap().balanced);
    // κ_{1,2} := 3 makes K2 = 3 while every other constant keeps its value
    rates[0] = q(3, 1);
    let d = moduli_membership_exact(net, &rates).unwrap();
    assert_eq!(d.tree_constants[1], q(3, 1));
    assert!(!d.balanced);
    let v = d.violated.unwrap();
    assert_ne!(v.lhs, v.rhs);
    assert!(v.binomial.u_plus[1] + v.binomial.u_minus[1] > 0);
}

#[test]
fn triangle_tree_constants_at_half_sum_rates() {
    // κ_ij = (i + j) / 2 on the complete triangle
    let net = load_bundled("triangle").unwrap().network;
    let rates: Vec<BigRational> = net
        .edges()
        .iter()
        .map(|e| q((e.source + 1 + e.target + 1) as i64, 2))
        .collect();
    let minor = tree_constants_minor(&net, &rates).unwrap().values;
    let enumerated = tree_constants_enumerated(&net, &rates, 8).unwrap().values;
    assert_eq!(minor, enumerated);
    // K1 = κ21 κ31 + κ32 κ21 + κ23 κ31 = (3/2)(2) + (5/2)(3/2) + (5/2)(2)
    assert_eq!(minor[0], q(3, 1) + q(15, 4) + q(5, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn minor_and_enumeration_agree_exactly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_strongly_connected(&mut r, 6);
        let rates = random_rates(&mut r, &net);
        let minor = tree_constants_minor(&net, &rates).unwrap();
        let oracle = tree_constants_enumerated(&net, &rates, 8).unwrap();
        prop_assert_eq!(&minor.values, &oracle.values);
        let a = laplacian(&net, &rates).unwrap();
        for j in 0..net.n() {
            let col = (0..net.n()).fold(BigRational::zero(), |acc, i| acc + &minor.values[i] * &a[i][j]);
            prop_assert!(col.is_zero());
        }
    }

    #[test]
    fn minor_and_enumeration_agree_on_arbitrary_digraphs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 6);
        let rates = random_rates(&mut r, &net);
        let minor = tree_constants_minor(&net, &rates).unwrap();
        let oracle = tree_constants_enumerated(&net, &rates, 8).unwrap();
        prop_assert_eq!(minor.values, oracle.values);
    }
}
