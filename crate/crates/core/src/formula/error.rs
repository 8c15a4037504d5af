use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("bound {value} is outside the range of {sort}")]
    BoundOutOfRange { value: i128, sort: String },
    #[error("empty range [{min}, {max}]")]
    EmptyRange { min: i128, max: i128 },
    #[error("expected {expected} bounds, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("the two formulas are over different variables")]
    VarSetMismatch,
    #[error("variable {0} is not declared at width {1}")]
    Undeclared(String, u32),
}
