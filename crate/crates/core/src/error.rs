use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid spin system: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("site {site} out of range for a {sites}-site register")]
    InvalidSite { site: usize, sites: usize },
    #[error("unphysical relaxation parameters: {0}")]
    UnphysicalParameters(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("circuit too large: {sites} sites exceeds the {limit}-site limit for this backend")]
    TooManySites { sites: usize, limit: usize },
    #[error("probability {value:e} out of range at t = {time} ns")]
    ProbabilityOutOfRange { value: f64, time: f64 },
    #[error("inconsistent time grids: {0}")]
    GridMismatch(String),
    #[error("noise level too high to correct: {0}")]
    UnrecoverableNoise(String),
    #[error("missing sector trace for {0}")]
    MissingSector(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
