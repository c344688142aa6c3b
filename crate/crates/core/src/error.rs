use thiserror::Error;

/// Errors raised by the p-adic kernels and the zeta evaluators.
///
/// The variant names are part of the CLI's machine-readable error objects,
/// so renaming one is a breaking change.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
    #[error("operands live over different primes ({0} vs {1})")]
    PrimeMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("argument is not a p-adic unit")]
    NotAUnit,
    #[error("argument is zero")]
    ZeroArgument,
    #[error("log_p needs an argument congruent to 1 mod p")]
    OutsideLogDomain,
    #[error("exp_p needs an argument of valuation >= 1")]
    OutsideExpDomain,
    #[error("exponent must lie in Z_p")]
    ExponentOutsideDomain,
    #[error("degree {requested} exceeds the Euler table bound {available}")]
    DegreeOverflow { requested: usize, available: usize },
    #[error("series needs {needed} terms but the budget allows {max_terms}")]
    BudgetExhausted { needed: usize, max_terms: usize },
    #[error("argument lies in Z_p; this evaluator needs v_p(x) <= -1")]
    ArgumentInZp,
    #[error("argument must lie in Z_p")]
    ArgumentNotInZp,
    #[error("shift condition violated: need v_p(x) - v_p(u) <= -1 and v_p(x) <= -1")]
    ShiftConditionViolated,
    #[error("distribution formula needs an odd N")]
    EvenN,
    #[error("argument violates the hypotheses: {0}")]
    ArgumentViolation(String),
    #[error("truncation needs {needed} evaluations, above the cap of {cap}")]
    TruncationCapExceeded { needed: u128, cap: u64 },
    #[error("integrand evaluation failed: {0}")]
    Integrand(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier used in machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "InvalidPrime",
            Error::InvalidPrecision(_) => "InvalidPrecision",
            Error::PrimeMismatch(..) => "PrimeMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotAUnit => "NotAUnit",
            Error::ZeroArgument => "ZeroArgument",
            Error::OutsideLogDomain => "OutsideLogDomain",
            Error::OutsideExpDomain => "OutsideExpDomain",
            Error::ExponentOutsideDomain => "ExponentOutsideDomain",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::ArgumentInZp => "ArgumentInZp",
            Error::ArgumentNotInZp => "ArgumentNotInZp",
            Error::ShiftConditionViolated => "ShiftConditionViolated",
            Error::EvenN => "EvenN",
            Error::ArgumentViolation(_) => "ArgumentViolation",
            Error::TruncationCapExceeded { .. } => "TruncationCapExceeded",
            Error::Integrand(_) => "Integrand",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
