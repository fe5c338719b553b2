use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: negative stoichiometric coefficient for species `{species}`")]
    NegativeCoefficient { line: usize, species: String },

    #[error("line {line}: rate constant must be strictly positive, got `{value}`")]
    NonPositiveRate { line: usize, value: String },

    #[error("line {line}: duplicate reaction {source_complex} -> {target_complex}")]
    DuplicateReaction {
        line: usize,
        source_complex: usize,
        target_complex: usize,
    },

    #[error("self-loop on complex {0}")]
    SelfLoop(usize),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("rate assignment covers {got} edges but the network has {expected}")]
    RateDomainMismatch { expected: usize, got: usize },

    #[error("no rate given for edge {source_complex} -> {target_complex}")]
    MissingRate {
        source_complex: usize,
        target_complex: usize,
    },

    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("linkage class of complex {index} has {size} nodes, enumeration limit is {limit}")]
    ClassTooLarge {
        index: usize,
        size: usize,
        limit: usize,
    },

    #[error("{pairs} reversible pairs exceed the orientation enumeration limit of {limit}")]
    TooManyPairs { pairs: usize, limit: usize },

    #[error("network is not weakly reversible")]
    NotWeaklyReversible,

    #[error("network is not reversible: {0} one-directional edges")]
    NotReversible(usize),

    #[error("system is not complex balancing (steady-state residual {residual:e})")]
    NotComplexBalancing { residual: f64 },

    #[error("system is not detailed balancing")]
    NotDetailedBalancing,

    #[error("initial concentrations must be strictly positive")]
    NonPositiveInitial,

    #[error("concentrations must be non-negative")]
    NegativeConcentration,

    #[error("Newton iteration did not converge in {iterations} steps (gradient norm {gradient_norm:e})")]
    MaxIterations {
        iterations: usize,
        gradient_norm: f64,
        best: Vec<f64>,
    },

    #[error("integration produced a non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("face index set must be non-empty")]
    EmptyFace,

    #[error("face index {index} out of range for {species} species")]
    FaceIndexOutOfRange { index: usize, species: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
