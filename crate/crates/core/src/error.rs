use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("overflow of the 128-bit range")]
    Overflow,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("uniform index over an empty range")]
    EmptyRange,
    #[error("cannot merge an empty list of run records")]
    EmptyLedger,
    #[error("mixed problem tags in ledger: {0} and {1}")]
    MixedProblems(String, String),
}
