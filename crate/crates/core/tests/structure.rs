mod common;

use proptest::prelude::*;
use toric_crn::cayley::{cayley_matrix, integer_kernel_basis};
use toric_crn::corpus::load_bundled;
use toric_crn::lattice::{contains, coordinates, saturated_kernel};
use toric_crn::{parse_network, to_dsl};

use common::*;

#[test]
fn known_structural_numbers() {
    let cases = [
        ("triangle", 3, 1, 1, 1),
        ("trap", 8, 4, 4, 0),
        ("two-substrate", 12, 4, 6, 2),
        ("two-substrate-reversible", 12, 4, 6, 2),
        ("recombination", 16, 7, 4, 5),
    ];
    for (name, n, l, sigma, delta) in cases {
        let net = load_bundled(name).unwrap().network;
        let r = net.structural_report();
        assert_eq!((r.n, r.l, r.sigma, r.delta), (n, l, sigma, delta), "{name}");
    }
}

#[test]
fn weak_reversibility_of_bundled_networks() {
    for (name, wr) in [
        ("triangle", true),
        ("triangle-noncyclic", false),
        ("two-substrate", false),
        ("two-substrate-reversible", true),
        ("recombination", true),
    ] {
        let net = load_bundled(name).unwrap().network;
        assert_eq!(net.is_weakly_reversible(), wr, "{name}");
        assert_eq!(brute_force_weakly_reversible(&net), wr, "{name}");
    }
}

#[test]
fn triangle_noncyclic_reaction_vectors_span_one_direction() {
    let net = load_bundled("triangle-noncyclic").unwrap().network;
    assert_eq!(net.edges().len(), 4);
    assert_eq!(net.stoichiometric_subspace().sigma, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn deficiency_is_cayley_kernel_dimension(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 7);
        let cay = cayley_matrix(&net);
        let lc = net.linkage_classes();
        prop_assert_eq!(cay.rank(), net.stoichiometric_subspace().sigma + lc.count());
        prop_assert_eq!(integer_kernel_basis(&cay).dim(), net.deficiency());
    }

    #[test]
    fn weak_reversibility_matches_reachability(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 8);
        prop_assert_eq!(net.is_weakly_reversible(), brute_force_weakly_reversible(&net));
    }

    #[test]
    fn kernel_basis_spans_the_saturated_lattice_rationally(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 7);
        let cay = cayley_matrix(&net);
        let basis = integer_kernel_basis(&cay);
        let sat = saturated_kernel(&cay.rows, cay.cols);
        prop_assert_eq!(sat.len(), basis.dim());
        let as_big: Vec<Vec<num_bigint::BigInt>> = basis
            .vectors
            .iter()
            .map(|v| v.iter().map(|&x| x.into()).collect())
            .collect();
        for v in &as_big {
            prop_assert!(contains(&sat, v), "kernel vector outside the saturated lattice");
        }
        for w in &sat {
            prop_assert!(coordinates(&as_big, w).is_some(), "saturated vector outside the rational span");
            let image = cay.apply(&w.iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>());
            prop_assert!(image.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn dsl_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 6);
        let rates = toric_crn::RateAssignment::exact(&net, random_rates(&mut r, &net)).unwrap();
        let text = to_dsl(&net, Some(&rates));
        let back = parse_network(&text).unwrap();
        prop_assert_eq!(&back.network, &net);
        prop_assert_eq!(back.rates().unwrap(), rates);
    }
}
