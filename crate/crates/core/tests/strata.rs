mod common;

use proptest::prelude::*;
use rand::Rng;
use toric_crn::balancing::scaling_vector;
use toric_crn::birch::BirchConfig;
use toric_crn::corpus::load_bundled;
use toric_crn::dynamics::{simulate, IntegratorConfig, InvariantPolyhedron};
use toric_crn::parse_network;
use toric_crn::strata::{acyclic_orientations, descent_check, farkas_vector, normal_alignment, stratum_of, FarkasOutcome};

use common::*;

#[test]
fn triangle_face_at_c1_zero_is_certified() {
    let net = load_bundled("triangle").unwrap().network;
    let l = [1.0, 1.0];
    // near the endpoint (0, 2) of the segment P: (L*c)^{y3} > (L*c)^{y2} > (L*c)^{y1}
    let loc = stratum_of(&net, &l, &[1e-3, 2.0 - 1e-3]).unwrap();
    assert!(loc.is_interior());
    assert_eq!(loc.orientation.topological_order, vec![2, 1, 0]);
    match farkas_vector(&net, &loc.orientation, &[0]).unwrap() {
        FarkasOutcome::Feasible(c) => {
            assert!(c.verify(&net, &loc.orientation));
            assert_eq!(c.alpha_f64(), vec![1.0, 0.0]);
        }
        other => panic!("{other:?}"),
    }
}

/// Points of `P` at distance `eps` from the relative interior of the face
/// `c_k = 0` of the simplex `c1 + c2 + c3 = total`.
fn near_face<R: Rng>(rng: &mut R, k: usize, total: f64, eps: f64) -> Vec<f64> {
    let split = rng.gen_range(0.1..0.9) * (total - eps);
    let mut c = vec![0.0; 3];
    c[k] = eps;
    c[(k + 1) % 3] = split;
    c[(k + 2) % 3] = total - eps - split;
    c
}

#[test]
fn strata_touching_a_face_admit_certificates() {
    // every stratum whose closure meets the relative interior of F_I has α
    let net = parse_network("A <-> B\nB <-> C\nA <-> C").unwrap().network;
    let poly = InvariantPolyhedron::new(&net, &[1.0, 1.0, 1.0]);
    let mut r = rng(3);
    for _ in 0..200 {
        let l: Vec<f64> = (0..3).map(|_| r.gen_range(0.2..5.0)).collect();
        let k = r.gen_range(0..3);
        let c = near_face(&mut r, k, 3.0, 1e-9);
        let loc = stratum_of(&net, &l, &c).unwrap();
        if !loc.is_interior() {
            continue;
        }
        let out = farkas_vector(&net, &loc.orientation, &[k]).unwrap();
        let cert = out.certificate().expect("a certificate exists");
        assert!(normal_alignment(&net, &poly, cert).unwrap().unwrap().aligned);
    }
}

#[test]
fn descent_along_cycle_trajectories() {
    let parsed = parse_network("A <-> B ; kf=2, kr=1\nB <-> C ; kf=3, kr=2\nA <-> C ; kf=3, kr=1").unwrap();
    let net = &parsed.network;
    let rates = parsed.rates().unwrap();
    let c0 = [0.01, 1.0, 2.0];
    let sv = scaling_vector(net, &rates, &c0, &BirchConfig::default()).unwrap();
    let sim = simulate(
        net,
        &rates,
        &c0,
        &IntegratorConfig {
            t_end: 20.0,
            ..Default::default()
        },
    )
    .unwrap();
    let report = descent_check(net, &sv.values, &sim.trajectory.states, &[0]).unwrap();
    assert!(report.evaluated > 0);
    assert!(report.minimum.unwrap() >= -1e-10);
    // at the Birch point the velocity vanishes
    let at_star = descent_check(net, &sv.values, std::slice::from_ref(&sv.birch_point), &[0]).unwrap();
    if let Some(m) = at_star.minimum {
        assert!(m.abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn farkas_dichotomy_is_certified(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_reversible(&mut r, 5);
        let orientations = acyclic_orientations(&net).unwrap();
        prop_assert!(orientations.iter().all(|o| o.verify(&net)));
        for o in &orientations {
            let mut face: Vec<usize> = (0..net.s()).filter(|_| r.gen_bool(0.5)).collect();
            if face.is_empty() {
                face.push(r.gen_range(0..net.s()));
            }
            let out = farkas_vector(&net, o, &face).unwrap();
            prop_assert!(out.verify(&net, o));
        }
    }

    #[test]
    fn random_points_lie_in_some_enumerated_orientation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_reversible(&mut r, 5);
        let all = acyclic_orientations(&net).unwrap();
        let l: Vec<f64> = (0..net.s()).map(|_| r.gen_range(0.2..4.0)).collect();
        let c: Vec<f64> = (0..net.s()).map(|_| r.gen_range(0.01..3.0)).collect();
        let loc = stratum_of(&net, &l, &c).unwrap();
        prop_assert!(all.iter().any(|o| o.edges == loc.orientation.edges));
    }
}
