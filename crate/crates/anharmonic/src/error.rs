use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("branch discontinuity: {0}")]
    Branch(String),
    #[error("step size underflow at x = {re} + {im}i")]
    StepUnderflow { re: f64, im: f64 },
    #[error("missed roots: {0}")]
    MissedRoots(String),
    #[error("degenerate basis: {0}")]
    Degenerate(String),
    #[error("unknown identifier: {0}")]
    Unknown(String),
    #[error("location mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn no_convergence(msg: impl Into<String>) -> Self {
        Error::NoConvergence(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
