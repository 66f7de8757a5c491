use thiserror::Error;

use crate::poly::ParseError;

/// Errors surfaced by the analysis and enumeration routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("not quasi-homogeneous: {0}")]
    NotQuasiHomogeneous(String),

    #[error("operation requires a non-monomial polynomial")]
    Monomial,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {p} lies in the exceptional set: {reason}")]
    ExceptionalPrime { p: u64, reason: String },

    #[error("enumeration of {required} points exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("wrong classification: {0}")]
    WrongClassification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks `base^exp <= budget`, returning the point count on success.
pub(crate) fn check_budget(base: u64, exp: u32, budget: u128) -> Result<u128> {
    let mut required: u128 = 1;
    for _ in 0..exp {
        required = match required.checked_mul(base as u128) {
            Some(v) => v,
            None => {
                return Err(Error::BudgetExceeded {
                    required: u128::MAX,
                    budget,
                })
            }
        };
    }
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required)
}
