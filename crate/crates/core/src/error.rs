use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero or by a value indistinguishable from zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("valuation is indeterminate, known only to be at least {at_least}")]
    IndeterminateValuation { at_least: i64 },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("out of convergence domain: {0}")]
    OutOfConvergenceDomain(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("logarithm outside its domain: {0}")]
    LogDomain(String),
    #[error("no exponent a0 with |a0| <= 1 solves q^a0 = lambda: {0}")]
    ExponentSolveFailed(String),
    #[error("operator is not solvable on the window: {0}")]
    NotSolvable(String),
    #[error("lemma hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("fixed point did not converge: {0}")]
    NotConverged(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::IndeterminateValuation { .. } => "IndeterminateValuation",
            Error::PrimeMismatch(..) => "PrimeMismatch",
            Error::OutOfConvergenceDomain(_) => "OutOfConvergenceDomain",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NotAUnit(_) => "NotAUnit",
            Error::LogDomain(_) => "LogDomain",
            Error::ExponentSolveFailed(_) => "ExponentSolveFailed",
            Error::NotSolvable(_) => "NotSolvable",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NotConverged(_) => "NotConverged",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
