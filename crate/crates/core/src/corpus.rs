//! Bundled example networks and the end-to-end corpus check.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cayley::moduli_membership_exact;
use crate::error::Result;
use crate::network::ReactionNetwork;
use crate::parse::{parse_network, ParsedNetwork};
use crate::rates::RateAssignment;

pub struct Bundled {
    pub name: &'static str,
    pub source: &'static str,
}

pub const BUNDLED: [Bundled; 6] = [
    Bundled {
        name: "triangle",
        source: include_str!("../networks/triangle.crn"),
    },
    Bundled {
        name: "triangle-noncyclic",
        source: include_str!("../networks/triangle-noncyclic.crn"),
    },
    Bundled {
        name: "trap",
        source: include_str!("../networks/trap.crn"),
    },
    Bundled {
        name: "two-substrate",
        source: include_str!("../networks/two-substrate.crn"),
    },
    Bundled {
        name: "two-substrate-reversible",
        source: include_str!("../networks/two-substrate-reversible.crn"),
    },
    Bundled {
        name: "recombination",
        source: include_str!("../networks/recombination.crn"),
    },
];

/// Source text of a bundled network, by name with or without `.crn`.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".crn").unwrap_or(name);
    BUNDLED.iter().find(|b| b.name == name).map(|b| b.source)
}

pub fn load_bundled(name: &str) -> Option<ParsedNetwork> {
    bundled_source(name).map(|s| parse_network(s).expect("bundled networks parse"))
}

/// Known structural values and the expected balancing behaviour under
/// randomly sampled rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub n: usize,
    pub l: usize,
    pub sigma: usize,
    pub delta: usize,
    pub weakly_reversible: bool,
    /// `Some(true)`: every sample is complex balancing; `Some(false)`: none
    /// is; `None`: depends on the rates.
    pub sampled_cb: Option<bool>,
}

pub fn expected(name: &str) -> Option<Expected> {
    let e = |n, l, sigma, delta, weakly_reversible, sampled_cb| Expected {
        n,
        l,
        sigma,
        delta,
        weakly_reversible,
        sampled_cb,
    };
    Some(match name {
        "triangle" => e(3, 1, 1, 1, true, None),
        "triangle-noncyclic" => e(3, 1, 1, 1, false, Some(false)),
        "trap" => e(8, 4, 4, 0, true, Some(true)),
        "two-substrate" => e(12, 4, 6, 2, false, Some(false)),
        "two-substrate-reversible" => e(12, 4, 6, 2, true, None),
        "recombination" => e(16, 7, 4, 5, true, None),
        _ => return None,
    })
}

/// Random positive rationals `p/q` with `1 <= p <= 20`, `1 <= q <= 10`.
pub fn sample_rates<R: Rng>(net: &ReactionNetwork, rng: &mut R) -> RateAssignment {
    let values = (0..net.edges().len())
        .map(|_| BigRational::new(rng.gen_range(1i64..=20).into(), rng.gen_range(1i64..=10).into()))
        .collect();
    RateAssignment::exact(net, values).expect("one positive rate per edge")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub n: usize,
    pub l: usize,
    pub s: usize,
    pub sigma: usize,
    pub delta: usize,
    pub weakly_reversible: bool,
    /// Decision for the rates written in the file.
    pub inline_cb: bool,
    /// Number of sampled rate vectors that were complex balancing.
    pub sampled_cb: usize,
    pub samples: usize,
    pub mismatches: Vec<String>,
}

impl CorpusRow {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub rows: Vec<CorpusRow>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CorpusRow::passed)
    }
}

pub fn run_corpus(seed: u64, samples: usize) -> Result<CorpusReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for b in &BUNDLED {
        let parsed = parse_network(b.source)?;
        let net = &parsed.network;
        let lc = net.linkage_classes();
        let sigma = net.stoichiometric_subspace().sigma;
        let inline = parsed.rates().expect("bundled networks carry rates");
        let inline_cb = moduli_membership_exact(net, &inline.exact_values().expect("exact"))?.balanced;
        let mut sampled_cb = 0;
        for _ in 0..samples {
            let r = sample_rates(net, &mut rng);
            if moduli_membership_exact(net, &r.exact_values().expect("exact"))?.balanced {
                sampled_cb += 1;
            }
        }
        let mut row = CorpusRow {
            name: b.name.to_string(),
            n: net.n(),
            l: lc.count(),
            s: net.s(),
            sigma,
            delta: net.deficiency(),
            weakly_reversible: net.is_weakly_reversible(),
            inline_cb,
            sampled_cb,
            samples,
            mismatches: Vec::new(),
        };
        if let Some(exp) = expected(b.name) {
            let mut check = |what: &str, got: String, want: String| {
                if got != want {
                    row.mismatches.push(format!("{what}: got {got}, expected {want}"));
                }
            };
            check("n", row.n.to_string(), exp.n.to_string());
            check("l", row.l.to_string(), exp.l.to_string());
            check("sigma", row.sigma.to_string(), exp.sigma.to_string());
            check("delta", row.delta.to_string(), exp.delta.to_string());
            check(
                "weakly_reversible",
                row.weakly_reversible.to_string(),
                exp.weakly_reversible.to_string(),
            );
            match exp.sampled_cb {
                Some(true) => check("sampled_cb", sampled_cb.to_string(), samples.to_string()),
                Some(false) => check("sampled_cb", sampled_cb.to_string(), "0".into()),
                None => {}
            }
        }
        rows.push(row);
    }
    Ok(CorpusReport { seed, rows })
}
