use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{what} has size {size}, above the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("point is not in the strategy polytope: {0}")]
    NotInPolytope(String),

    #[error("invalid deviation: {0}")]
    InvalidDeviation(String),

    #[error("learner state does not match this decision DAG ({0})")]
    StateMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("round budget of {rounds} exhausted; last error {last_error}")]
    BudgetExhausted { rounds: usize, last_error: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
