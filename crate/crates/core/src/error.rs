use thiserror::Error;

use crate::complexity::EligibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("n = {0} is trivial, the degree n must be at least 2")]
    TrivialDegree(u64),

    #[error("{x} is not invertible modulo {r}")]
    NotInvertible { x: u64, r: u64 },

    #[error("{k} does not divide {r} - 1")]
    OrderDoesNotDivide { k: u64, r: u64 },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("characteristic {p} coincides with r = {r}")]
    CharacteristicIsModulus { p: u64, r: u64 },

    #[error("cannot factor zero")]
    FactorZero,

    #[error("prime factor {0} does not fit in a machine word")]
    FactorTooLarge(String),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("({u}, {v}) is not an admissible exponent pair for k = {k}")]
    NotAdmissiblePair { k: u64, u: u64, v: u64 },

    #[error(
        "q = {q} does not give a normal basis: e = {}, nk/e = {}, gcd(nk/e, n) = {}",
        .report.e, .report.quotient, .report.gcd_value
    )]
    NotEligible { q: u64, report: EligibilityReport },

    #[error("closed form does not apply: {0}")]
    ClosedFormUnavailable(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
