use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("valuation undefined: input is zero")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("all coordinates are zero")]
    AllZero,
    #[error("point lies in boundary divisor {0}")]
    BoundaryPoint(String),
    #[error("model {model} has no divisor labelled {label}")]
    UnknownDivisor { model: String, label: String },
    #[error("unknown model name {0:?}")]
    UnknownModel(String),
    #[error("L not in effective-cone interior")]
    IneffectiveL,
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
    #[error("T = {0} exceeds the brute-force cap {1}; use count_fast")]
    BruteForceCap(f64, f64),
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
