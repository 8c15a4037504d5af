use std::collections::HashMap;

use super::ast::{always_returns, BinaryOp, Block, Expr, ExprKind, Function, Span, Stmt, StmtKind, Ty, UnaryOp};
use super::error::{TypeError, TypeErrorKind};
use super::sort::IntSort;

/// A function whose every expression carries a sort and whose every path
/// returns. Construct with [`typecheck`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedFunction(Function);

impl TypedFunction {
    pub fn function(&self) -> &Function {
        &self.0
    }

    pub fn into_inner(self) -> Function {
        self.0
    }
}

impl std::ops::Deref for TypedFunction {
    type Target = Function;

    fn deref(&self) -> &Function {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TypecheckOptions {
    pub reject_division: bool,
}

pub fn typecheck(f: Function) -> Result<TypedFunction, TypeError> {
    typecheck_with(f, TypecheckOptions::default())
}

pub fn typecheck_with(mut f: Function, options: TypecheckOptions) -> Result<TypedFunction, TypeError> {
    let mut checker =
        Checker { options, scopes: vec![f.params.iter().map(|p| (p.name.clone(), p.sort)).collect()], ret: f.ret };
    checker.block(&mut f.body)?;
    if !always_returns(&f.body) {
        return Err(TypeError { span: f.span, kind: TypeErrorKind::MissingReturn(f.name.clone()) });
    }
    Ok(TypedFunction(f))
}

/// Sort given to a literal-only operand with no other context.
const DEFAULT_SORT: IntSort = IntSort::I32;
/// Sort given to a literal-only cast operand, wide enough for any literal.
const CAST_OPERAND_SORT: IntSort = IntSort::I64;

struct Checker {
    options: TypecheckOptions,
    scopes: Vec<HashMap<String, IntSort>>,
    ret: IntSort,
}

fn err<T>(span: Span, kind: TypeErrorKind) -> Result<T, TypeError> {
    Err(TypeError { span, kind })
}

fn mismatch(span: Span, expected: IntSort, found: IntSort) -> TypeError {
    TypeError { span, kind: TypeErrorKind::SortMismatch { expected: expected.to_string(), found: found.to_string() } }
}

impl Checker {
    fn lookup(&self, name: &str) -> Option<IntSort> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn block(&mut self, block: &mut Block) -> Result<(), TypeError> {
        self.scopes.push(HashMap::new());
        for stmt in block.iter_mut() {
            self.stmt(stmt)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn stmt(&mut self, stmt: &mut Stmt) -> Result<(), TypeError> {
        match &mut stmt.kind {
            StmtKind::Let { name, sort, init } => {
                self.check_int(init, *sort)?;
                self.scopes.last_mut().expect("scope").insert(name.clone(), *sort);
            }
            StmtKind::Assign { name, value } => {
                let sort = self
                    .lookup(name)
                    .ok_or_else(|| TypeError { span: stmt.span, kind: TypeErrorKind::UnknownVariable(name.clone()) })?;
                self.check_int(value, sort)?;
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.check_bool(cond)?;
                self.block(then_block)?;
                if let Some(else_block) = else_block {
                    self.block(else_block)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.check_bool(cond)?;
                self.block(body)?;
            }
            StmtKind::Return(value) => {
                let ret = self.ret;
                self.check_int(value, ret)?;
            }
        }
        Ok(())
    }

    /// Sort of an integer expression that is not made only of literals;
    /// `None` means the expression adopts its sort from context.
    fn infer(&self, e: &Expr) -> Result<Option<IntSort>, TypeError> {
        match &e.kind {
            ExprKind::Lit { .. } => Ok(None),
            ExprKind::Var(name) => match self.lookup(name) {
                Some(sort) => Ok(Some(sort)),
                None => err(e.span, TypeErrorKind::UnknownVariable(name.clone())),
            },
            ExprKind::Cast(sort, _) => Ok(Some(*sort)),
            ExprKind::Unary(UnaryOp::Not, _) => err(e.span, TypeErrorKind::BoolAsInt),
            ExprKind::Unary(_, inner) => self.infer(inner),
            ExprKind::Binary(op, _, _) if !op.is_arithmetic() => err(e.span, TypeErrorKind::BoolAsInt),
            ExprKind::Binary(_, l, r) => match (self.infer(l)?, self.infer(r)?) {
                (Some(a), Some(b)) if a != b => Err(mismatch(r.span, a, b)),
                (a, b) => Ok(a.or(b)),
            },
            ExprKind::Call(name, _) => err(e.span, TypeErrorKind::UninlinedCall(name.clone())),
        }
    }

    fn check_int(&mut self, e: &mut Expr, sort: IntSort) -> Result<(), TypeError> {
        let span = e.span;
        match &mut e.kind {
            ExprKind::Lit { value, hex } => {
                let fits =
                    if *hex { *value >= 0 && *value as u128 <= sort.mask() as u128 } else { sort.contains(*value) };
                if !fits {
                    return err(span, TypeErrorKind::LiteralRange { value: *value, sort: sort.to_string() });
                }
            }
            ExprKind::Var(name) => {
                let found = self
                    .lookup(name)
                    .ok_or_else(|| TypeError { span, kind: TypeErrorKind::UnknownVariable(name.clone()) })?;
                if found != sort {
                    return Err(mismatch(span, sort, found));
                }
            }
            ExprKind::Cast(target, inner) => {
                if *target != sort {
                    return Err(mismatch(span, sort, *target));
                }
                let from = self.infer(inner)?.unwrap_or(CAST_OPERAND_SORT);
                self.check_int(inner, from)?;
            }
            ExprKind::Unary(UnaryOp::Not, _) => return err(span, TypeErrorKind::BoolAsInt),
            ExprKind::Unary(_, inner) => self.check_int(inner, sort)?,
            ExprKind::Binary(op, _, _) if !op.is_arithmetic() => return err(span, TypeErrorKind::BoolAsInt),
            ExprKind::Binary(op, l, r) => {
                if self.options.reject_division && matches!(op, BinaryOp::Div | BinaryOp::Rem) {
                    return err(span, TypeErrorKind::DivisionRejected);
                }
                self.check_int(l, sort)?;
                self.check_int(r, sort)?;
            }
            ExprKind::Call(name, _) => return err(span, TypeErrorKind::UninlinedCall(name.clone())),
        }
        e.ty = Some(Ty::Int(sort));
        Ok(())
    }

    fn check_bool(&mut self, e: &mut Expr) -> Result<(), TypeError> {
        let span = e.span;
        match &mut e.kind {
            ExprKind::Unary(UnaryOp::Not, inner) => self.check_bool(inner)?,
            ExprKind::Binary(op, l, r) if op.is_logical() => {
                self.check_bool(l)?;
                self.check_bool(r)?;
            }
            ExprKind::Binary(op, l, r) if op.is_comparison() => {
                let sort = match (self.infer(l)?, self.infer(r)?) {
                    (Some(a), Some(b)) if a != b => return Err(mismatch(r.span, a, b)),
                    (a, b) => a.or(b).unwrap_or(DEFAULT_SORT),
                };
                self.check_int(l, sort)?;
                self.check_int(r, sort)?;
            }
            ExprKind::Call(name, _) => return err(span, TypeErrorKind::UninlinedCall(name.clone())),
            _ => return err(span, TypeErrorKind::IntAsBool),
        }
        e.ty = Some(Ty::Bool);
        Ok(())
    }
}
