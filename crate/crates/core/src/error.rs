use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is reducible over Q: factor {0}")]
    Reducible(String),
    #[error("polynomial has degree 0")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("embedding {0} is not real")]
    NonRealEmbedding(usize),
    #[error("degree budget exceeded: {0}")]
    DegreeBudgetExceeded(String),
    #[error("prime {0} divides the discriminant of the defining polynomial")]
    RamifiedOrIndexDivisor(String),
    #[error("support contains the bad prime {0}")]
    SupportHitsBadPrime(String),
    #[error("divisor is not integral")]
    NonIntegral,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("denominator divisors are not coprime")]
    DenominatorsNotCoprime,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("point is the identity")]
    IdentityPoint,
    #[error("x-coordinate is zero")]
    ZeroXCoordinate,
    #[error("curve has bad reduction at {0}")]
    BadReduction(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("{0} is a perfect square")]
    PerfectSquare(String),
    #[error("subfield data missing")]
    SubfieldDataMissing,
    #[error("order budget exceeded")]
    OrderBudgetExceeded,
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("Bezout identity has no solution: {0}")]
    BezoutFailure(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("family is linearly dependent")]
    DependentFamily,
    #[error("generator is not a unit")]
    NonUnitGenerator,
    #[error("sieve budget exhausted")]
    SieveBudgetExhausted,
    #[error("could not factor {0} within budget")]
    FactorizationBudget(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
