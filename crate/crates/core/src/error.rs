use thiserror::Error;

/// Errors raised by the series kernel, the solvers and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series built under different truncation policies or variable sets")]
    PolicyMismatch,
    #[error("hbar^2 exponent {exponent} below the ring floor {floor}")]
    HbarFloor { exponent: i32, floor: i32 },
    #[error("monomial {0} lies outside the truncation policy; its coefficient is unknown")]
    OutOfPolicy(String),
    #[error("variable {0} is not active in this ring")]
    InactiveVariable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("substitution for {0} needs infinitely many source terms")]
    InexactSubstitution(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("linear system inconsistent: {0}")]
    Inconsistent(String),
    #[error("linear system underdetermined: {0}")]
    Underdetermined(String),
    #[error("requested value outside computed truncation: {0}")]
    OutOfRange(String),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
