use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("polynomial is reducible over Q: factor {0}")]
    Reducible(String),
    #[error("irreducibility could not be certified: {0}")]
    IrreducibilityUndecided(String),
    #[error("root interval isolates {count} real roots (need exactly one)")]
    RootIsolation { count: usize },
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular forms matrix")]
    Singular,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration budget exhausted after {0} candidates")]
    BudgetExhausted(u64),
    #[error("no passing configuration: {0}")]
    NoConfiguration(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
