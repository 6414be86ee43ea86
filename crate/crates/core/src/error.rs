use thiserror::Error;

/// Errors produced anywhere in the multiplicity pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("variable contexts do not match")]
    ContextMismatch,
    #[error("expected a form of rank {expected}, got rank {actual}")]
    RankMismatch { expected: usize, actual: usize },
    #[error("form count mismatch: expected {expected} one-forms, got {actual}")]
    CountMismatch { expected: usize, actual: usize },
    #[error("one-form with non-constant coefficients supplied where a constant form is required")]
    NonConstantForm,
    #[error("Groebner computation exceeded its budget of {budget} S-pairs")]
    BudgetExceeded { budget: usize },
    #[error("multiplicity cap must be at least 1")]
    InvalidCap,
    #[error("system has {equations} equations in {variables} variables; slice it first")]
    UnderdeterminedSystem { equations: usize, variables: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Pfaffian system is not integrable: {0}")]
    NonIntegrable(String),
    #[error("truncation order must be at least 2")]
    OrderTooSmall,
    #[error("leaf multiplicity differs between truncation orders {order} ({low}) and {higher} ({high})")]
    TruncationUnstable {
        order: usize,
        higher: usize,
        low: String,
        high: String,
    },
    #[error("vector field vanishes at the point")]
    Singular,
    #[error("degenerate parameter pack: {0}")]
    DegeneratePack(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("vector field is not invariant (expected diagonal form lambda_i * x_i)")]
    NonInvariantField,
    #[error("cap exceeded on component {trace:?}")]
    ComponentCapExceeded { trace: Vec<usize> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
