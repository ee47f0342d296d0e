use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameters violate the ordering tau(0) < t* < tau(1): {0}")]
    AssumptionViolated(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("iteration did not converge: {0}")]
    NotConverged(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("candidate outside its regime: {0}")]
    RegimeMismatch(String),
    #[error("this solver needs r_A == r_P (got r_A = {r_a}, r_P = {r_p})")]
    UnequalRates { r_a: f64, r_p: f64 },
    #[error("result misses tolerance: {0}")]
    Tolerance(String),
}

impl Error {
    /// True for errors caused by the input rather than by a solve.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidParams(_) | Error::AssumptionViolated(_))
    }
}
