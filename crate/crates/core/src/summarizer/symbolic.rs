use std::collections::HashMap;

use super::{Disjunct, SummarizeError, Summary};
use crate::formula::{BinOp, BvVar, Formula, Term, UnOp};
use crate::minilang::{BinaryOp, Expr, ExprKind, Span, Stmt, StmtKind, TypedFunction, UnaryOp};

/// Decides whether a path condition may be satisfiable. Answering `true`
/// is always safe; `false` must only be returned for unsatisfiable paths.
pub trait PathPruner {
    fn maybe_feasible(&mut self, inputs: &[BvVar], path: &Formula) -> bool;
}

/// Name of the output variable: `out`, unless a parameter already uses it.
pub fn output_name(f: &TypedFunction) -> String {
    let mut name = String::from("out");
    while f.params.iter().any(|p| p.name == name) {
        name.push('_');
    }
    name
}

#[derive(Clone, Copy)]
enum Frame<'a> {
    Seq(&'a [Stmt]),
    Loop { cond: &'a Expr, body: &'a [Stmt], done: u32, span: Span },
}

#[derive(Clone)]
struct State<'a> {
    env: HashMap<String, Term>,
    path: Vec<Formula>,
    stack: Vec<Frame<'a>>,
}

struct Executor<'p> {
    inputs: Vec<BvVar>,
    unroll_limit: u32,
    pruner: Option<&'p mut dyn PathPruner>,
    disjuncts: Vec<Disjunct>,
}

pub fn summarize_with(
    f: &TypedFunction,
    unroll_limit: u32,
    pruner: Option<&mut dyn PathPruner>,
) -> Result<Summary, SummarizeError> {
    assert!(unroll_limit >= 1, "unroll limit must be positive");
    let inputs: Vec<BvVar> = f.params.iter().map(|p| BvVar::input(&p.name, p.sort)).collect();
    let output = BvVar::output(output_name(f), f.ret);
    let env = inputs.iter().map(|v| (v.name.clone(), v.term())).collect();
    let mut exec = Executor { inputs: inputs.clone(), unroll_limit, pruner, disjuncts: Vec::new() };
    exec.run(State { env, path: Vec::new(), stack: vec![Frame::Seq(&f.body)] })?;
    Ok(Summary { inputs, output, disjuncts: exec.disjuncts })
}

impl Executor<'_> {
    /// Extends `state.path` with `cond`, or returns `None` if the branch is
    /// infeasible.
    fn branch<'a>(&mut self, state: &State<'a>, cond: Formula) -> Option<State<'a>> {
        if cond == Formula::ff() {
            return None;
        }
        let mut next = state.clone();
        if cond != Formula::tt() {
            next.path.push(cond);
            if let Some(pruner) = self.pruner.as_deref_mut() {
                if !pruner.maybe_feasible(&self.inputs, &Formula::and(next.path.iter().cloned())) {
                    return None;
                }
            }
        }
        Some(next)
    }

    fn run<'a>(&mut self, mut state: State<'a>) -> Result<(), SummarizeError> {
        while let Some(frame) = state.stack.pop() {
            match frame {
                Frame::Seq([]) => {}
                Frame::Seq([stmt, rest @ ..]) => {
                    state.stack.push(Frame::Seq(rest));
                    match &stmt.kind {
                        StmtKind::Let { name, init: value, .. } | StmtKind::Assign { name, value } => {
                            let t = term(&state.env, value);
                            state.env.insert(name.clone(), t);
                        }
                        StmtKind::Return(value) => {
                            let ret = term(&state.env, value);
                            self.disjuncts.push(Disjunct { path: Formula::and(state.path), ret });
                            return Ok(());
                        }
                        StmtKind::If { cond, then_block, else_block } => {
                            let c = condition(&state.env, cond);
                            if let Some(mut taken) = self.branch(&state, c.clone()) {
                                taken.stack.push(Frame::Seq(then_block));
                                self.run(taken)?;
                            }
                            let Some(mut other) = self.branch(&state, Formula::not(c)) else {
                                return Ok(());
                            };
                            if let Some(else_block) = else_block {
                                other.stack.push(Frame::Seq(else_block));
                            }
                            state = other;
                        }
                        StmtKind::While { cond, body } => {
                            state.stack.push(Frame::Loop { cond, body, done: 0, span: stmt.span });
                        }
                    }
                }
                Frame::Loop { cond, body, done, span } => {
                    let c = condition(&state.env, cond);
                    if let Some(mut again) = self.branch(&state, c.clone()) {
                        if done >= self.unroll_limit {
                            return Err(SummarizeError::UnrollLimitExceeded { limit: self.unroll_limit, span });
                        }
                        again.stack.push(Frame::Loop { cond, body, done: done + 1, span });
                        again.stack.push(Frame::Seq(body));
                        self.run(again)?;
                    }
                    match self.branch(&state, Formula::not(c)) {
                        Some(exit) => state = exit,
                        None => return Ok(()),
                    }
                }
            }
        }
        unreachable!("a type-checked function returns on every path")
    }
}

fn term(env: &HashMap<String, Term>, e: &Expr) -> Term {
    let sort = e.sort();
    match &e.kind {
        ExprKind::Lit { value, .. } => Term::int(sort, *value),
        ExprKind::Var(name) => env.get(name).unwrap_or_else(|| panic!("unbound variable {name}")).clone(),
        ExprKind::Cast(to, inner) => Term::cast(term(env, inner), inner.sort(), *to),
        ExprKind::Unary(UnaryOp::Neg, inner) => Term::unary(UnOp::Neg, term(env, inner)),
        ExprKind::Unary(UnaryOp::BitNot, inner) => Term::unary(UnOp::Not, term(env, inner)),
        ExprKind::Binary(op, l, r) => {
            let signed = sort.is_signed();
            let op = match op {
                BinaryOp::Add => BinOp::Add,
                BinaryOp::Sub => BinOp::Sub,
                BinaryOp::Mul => BinOp::Mul,
                BinaryOp::Div if signed => BinOp::Sdiv,
                BinaryOp::Div => BinOp::Udiv,
                BinaryOp::Rem if signed => BinOp::Srem,
                BinaryOp::Rem => BinOp::Urem,
                BinaryOp::Shl => BinOp::Shl,
                BinaryOp::Shr if signed => BinOp::Ashr,
                BinaryOp::Shr => BinOp::Lshr,
                BinaryOp::BitAnd => BinOp::And,
                BinaryOp::BitOr => BinOp::Or,
                BinaryOp::BitXor => BinOp::Xor,
                other => panic!("{} is not an integer operator", other.symbol()),
            };
            Term::binary(op, term(env, l), term(env, r))
        }
        ExprKind::Unary(UnaryOp::Not, _) | ExprKind::Call(..) => panic!("not an integer expression"),
    }
}

fn condition(env: &HashMap<String, Term>, e: &Expr) -> Formula {
    match &e.kind {
        ExprKind::Unary(UnaryOp::Not, inner) => Formula::not(condition(env, inner)),
        ExprKind::Binary(BinaryOp::And, l, r) => Formula::and([condition(env, l), condition(env, r)]),
        ExprKind::Binary(BinaryOp::Or, l, r) => Formula::or([condition(env, l), condition(env, r)]),
        ExprKind::Binary(op, l, r) => {
            let sort = l.sort();
            let (a, b) = (term(env, l), term(env, r));
            match op {
                BinaryOp::Lt => Formula::lt(sort, a, b),
                BinaryOp::Le => Formula::le(sort, a, b),
                BinaryOp::Gt => Formula::lt(sort, b, a),
                BinaryOp::Ge => Formula::le(sort, b, a),
                BinaryOp::Eq => Formula::eq(a, b),
                BinaryOp::Ne => Formula::not(Formula::eq(a, b)),
                other => panic!("{} is not a condition", other.symbol()),
            }
        }
        _ => panic!("not a condition"),
    }
}
