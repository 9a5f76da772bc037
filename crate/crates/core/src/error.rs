use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid has {cells} cells, more than the configured maximum {max}")]
    TooManyCells { cells: usize, max: usize },
    #[error("non-finite value {value} at cell {cell}")]
    NonFinite { cell: usize, value: f64 },
    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("weight is not strictly positive and finite at cell {cell} (value {value})")]
    NonPositiveWeight { cell: usize, value: f64 },
    #[error("modular is not monotone in lambda ({0})")]
    NonMonotoneModular(String),
    #[error("Rubio series does not contract within {terms} terms (observed ratio {ratio})")]
    NotContracting { terms: usize, ratio: f64 },
    #[error("cascade did not converge within {iterations} iterations (residual {residual})")]
    CascadeDiverged { iterations: usize, residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("pair family contract violated: {0}")]
    ContractViolation(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
