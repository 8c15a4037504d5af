use std::fmt;

use super::sort::IntSort;

/// Source position (1-based). Spans never take part in equality, so two
/// trees that differ only in layout compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Int(IntSort),
    Bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    BitNot,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Shl,
    Shr,
    BitAnd,
    BitOr,
    BitXor,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn is_comparison(self) -> bool {
        matches!(self, Self::Lt | Self::Le | Self::Gt | Self::Ge | Self::Eq | Self::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, Self::And | Self::Or)
    }

    pub fn is_arithmetic(self) -> bool {
        !self.is_comparison() && !self.is_logical()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Add => "+",
            Self::Sub => "-",
            Self::Mul => "*",
            Self::Div => "/",
            Self::Rem => "%",
            Self::Shl => "<<",
            Self::Shr => ">>",
            Self::BitAnd => "&",
            Self::BitOr => "|",
            Self::BitXor => "^",
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
            Self::Eq => "==",
            Self::Ne => "!=",
            Self::And => "&&",
            Self::Or => "||",
        }
    }

    /// C binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            Self::Or => 1,
            Self::And => 2,
            Self::BitOr => 3,
            Self::BitXor => 4,
            Self::BitAnd => 5,
            Self::Eq | Self::Ne => 6,
            Self::Lt | Self::Le | Self::Gt | Self::Ge => 7,
            Self::Shl | Self::Shr => 8,
            Self::Add | Self::Sub => 9,
            Self::Mul | Self::Div | Self::Rem => 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    /// Integer literal. `hex` literals may denote any bit pattern of the
    /// target width; decimal literals must lie in the sort's range.
    Lit {
        value: i128,
        hex: bool,
    },
    Var(String),
    Cast(IntSort, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Only present before inlining; a parsed `Function` never contains one.
    Call(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
    /// Filled in by the type checker.
    pub ty: Option<Ty>,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span, ty: None }
    }

    /// Integer sort assigned by the type checker.
    ///
    /// Panics on an unchecked or boolean expression.
    pub fn sort(&self) -> IntSort {
        match self.ty {
            Some(Ty::Int(sort)) => sort,
            other => panic!("expression at {} has no integer sort ({other:?})", self.span),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Let { name: String, sort: IntSort, init: Expr },
    Assign { name: String, value: Expr },
    If { cond: Expr, then_block: Block, else_block: Option<Block> },
    While { cond: Expr, body: Block },
    Return(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

pub type Block = Vec<Stmt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub sort: IntSort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: IntSort,
    pub body: Block,
    pub span: Span,
}

impl Function {
    pub fn param_sorts(&self) -> Vec<IntSort> {
        self.params.iter().map(|p| p.sort).collect()
    }

    /// Drops type annotations, giving the tree `parse` would produce.
    pub fn strip_types(mut self) -> Function {
        fn expr(e: &mut Expr) {
            e.ty = None;
            match &mut e.kind {
                ExprKind::Cast(_, inner) | ExprKind::Unary(_, inner) => expr(inner),
                ExprKind::Binary(_, l, r) => {
                    expr(l);
                    expr(r);
                }
                ExprKind::Call(_, args) => args.iter_mut().for_each(expr),
                ExprKind::Lit { .. } | ExprKind::Var(_) => {}
            }
        }
        fn block(b: &mut [Stmt]) {
            for stmt in b {
                match &mut stmt.kind {
                    StmtKind::Let { init: e, .. } | StmtKind::Assign { value: e, .. } | StmtKind::Return(e) => expr(e),
                    StmtKind::If { cond, then_block, else_block } => {
                        expr(cond);
                        block(then_block);
                        if let Some(else_block) = else_block {
                            block(else_block);
                        }
                    }
                    StmtKind::While { cond, body } => {
                        expr(cond);
                        block(body);
                    }
                }
            }
        }
        block(&mut self.body);
        self
    }
}

/// Does every control-flow path through `block` end in `return`?
pub fn always_returns(block: &[Stmt]) -> bool {
    block.iter().any(|stmt| match &stmt.kind {
        StmtKind::Return(_) => true,
        StmtKind::If { then_block, else_block: Some(else_block), .. } => {
            always_returns(then_block) && always_returns(else_block)
        }
        _ => false,
    })
}

pub(crate) fn block_contains_return(block: &[Stmt]) -> bool {
    block.iter().any(stmt_contains_return)
}

pub(crate) fn stmt_contains_return(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return(_) => true,
        StmtKind::If { then_block, else_block, .. } => {
            block_contains_return(then_block) || else_block.as_deref().is_some_and(block_contains_return)
        }
        StmtKind::While { body, .. } => block_contains_return(body),
        _ => false,
    }
}
