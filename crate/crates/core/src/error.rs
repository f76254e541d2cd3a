use thiserror::Error;

/// Errors raised by constructions, verifiers and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} has no inverse modulo {1}")]
    ZeroInverse(u64, u64),
    #[error("{0} is out of range: {1}")]
    OutOfRange(u64, &'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameterized sets coincide (witness c = {witness:?})")]
    DegenerateParams { witness: Option<u64> },
    #[error("epsilon vectors are identical")]
    SameEpsilon,
    #[error("bound not certified: {0}")]
    NotCertified(String),
    #[error("enumeration of {work} terms exceeds budget {budget}")]
    RangeTooLarge { work: u128, budget: u128 },
    #[error("degree 2s = {two_s} reaches modulus {modulus}")]
    DegreeTooLarge { two_s: u64, modulus: u64 },
    #[error("gram oracle needs {needed} inner products, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("support gram matrix is ill-conditioned (estimate {0:e})")]
    IllConditioned(f64),
    #[error("frequency {0:?} lies outside the certified box")]
    FrequencyOutOfBox(Vec<i64>),
    #[error("malformed point set: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
