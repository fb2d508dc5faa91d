use thiserror::Error;

/// Errors raised by the algebra, surgery and obstruction layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("no exact quotient exists")]
    NotDivisible,
    #[error("polynomial is not symmetric up to a unit")]
    NotSymmetric,
    #[error("{d} is not an admissible divisor of {p}")]
    BadDivisor { d: u64, p: u64 },
    #[error("bad arity: {0}")]
    BadArity(String),
    #[error("polynomial does not split into f and g parts: {0}")]
    NotDecomposable(String),
    #[error("first homology is not cyclic of order at least 2")]
    NotCyclic,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("element is not invertible")]
    NotInvertible,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
