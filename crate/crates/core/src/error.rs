use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("region is unbounded")]
    Unbounded,
    #[error("region is empty")]
    Empty,
    #[error("region is not full-dimensional (affine dimension {0})")]
    NotFullDimensional(usize),
    #[error("combinatorial type changed: {0}")]
    TypeChange(String),
    #[error("interpolation grid cannot avoid a type change; shrink the step by a factor of {0}")]
    GridTypeChange(String),
    #[error("polytope is not simple")]
    NotSimple,
    #[error("the exact backend needs a Delzant polytope; use the complex backend")]
    NotDelzant,
    #[error("matrix is singular")]
    Singular,
    #[error("coefficient of t^{requested} requested but series is known only through t^{available}")]
    OrderExceeded { requested: i64, available: i64 },
    #[error("sample set is not poised: {0}")]
    NotPoised(String),
    #[error("samples are inconsistent with a polynomial of the stated degree")]
    InconsistentSamples,
    #[error("no generic direction found among {0} candidates")]
    NoGenericDirection(usize),
    #[error("divisor is not nef: {0}")]
    NotNef(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
