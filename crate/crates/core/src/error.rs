use thiserror::Error;

/// Errors produced by the engine.
///
/// `Invariant` is reserved for conditions that can only arise from a bug:
/// the mathematics guarantees they never fire on valid input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),

    #[error("field characteristic {p} is too small: the algebra needs p >= {required}")]
    CharacteristicTooSmall { p: u32, required: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not strictly upper triangular at ({row}, {col})")]
    NotStrictlyUpper { row: usize, col: usize },

    #[error("element does not lie in the algebra")]
    NotInAlgebra,

    #[error("subspace is not a subalgebra")]
    NotSubalgebra,

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("expected a codimension-one subalgebra, got codimension {0}")]
    Codimension(usize),

    #[error("enumeration budget exceeded: {required} points needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure_invariant {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Invariant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_invariant;
