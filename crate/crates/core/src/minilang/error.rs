use thiserror::Error;

use super::ast::Span;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParam(String),
    #[error("unknown type name `{0}`")]
    UnknownType(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is already declared in this scope")]
    DuplicateVariable(String),
    #[error("unknown function `{0}` (calls may only target functions defined earlier in the file)")]
    UnknownFunction(String),
    #[error("duplicate function `{0}`")]
    DuplicateFunction(String),
    #[error("function `{name}` expects {expected} arguments, got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("function `{0}` does not return on every path")]
    CalleeNotTotal(String),
    #[error("function `{0}` returns from inside a loop and cannot be inlined")]
    ReturnInLoop(String),
    #[error("calls are not allowed in loop conditions")]
    CallInLoopCondition,
    #[error("source contains no function")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}:{}: {kind}", span.line, span.col)]
pub struct ParseError {
    pub span: Span,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(span: Span, kind: ParseErrorKind) -> ParseError {
        ParseError { span, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: String, found: String },
    #[error("literal {value} does not fit in {sort}")]
    LiteralRange { value: i128, sort: String },
    #[error("boolean expression used where an integer is required")]
    BoolAsInt,
    #[error("integer expression used as a condition")]
    IntAsBool,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("function `{0}` does not return on every path")]
    MissingReturn(String),
    #[error("division or remainder rejected by configuration")]
    DivisionRejected,
    #[error("unexpected call to `{0}` (calls must be inlined before type checking)")]
    UninlinedCall(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}:{}: {kind}", span.line, span.col)]
pub struct TypeError {
    pub span: Span,
    pub kind: TypeErrorKind,
}
