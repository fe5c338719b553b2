//! Analysis of mass-action reaction networks as toric dynamical systems.
//!
//! Structural invariants and balancing decisions run in exact rational
//! arithmetic; Birch-point computation and trajectory simulation run in
//! `f64`.

pub mod balancing;
pub mod birch;
pub mod cayley;
pub mod corpus;
pub mod error;
pub mod dynamics;
pub mod exact;
pub mod lattice;
pub mod network;
pub mod parse;
pub mod rates;
pub mod scalar;
pub mod simplex;
pub mod strata;
pub mod tree;

pub use error::{Error, Result};
pub use network::{Complex, Edge, ReactionNetwork, StructuralReport};
pub use parse::{parse_network, to_dsl, ParsedNetwork};
pub use rates::{laplacian, Rate, RateAssignment};
pub use scalar::Scalar;
