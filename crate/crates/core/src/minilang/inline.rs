//! Scope resolution and call inlining.
//!
//! Calls may only target functions defined earlier in the same source, so
//! the call graph is acyclic. Each call is hoisted into a temporary, and the
//! callee body is spliced in with its locals renamed and every `return e`
//! rewritten to an assignment of the temporary.

use std::collections::{HashMap, HashSet};

use super::ast::{
    always_returns, block_contains_return, stmt_contains_return, Block, Expr, ExprKind, Function, Span, Stmt, StmtKind,
};
use super::error::{ParseError, ParseErrorKind};

pub fn resolve_and_inline(functions: Vec<Function>) -> Result<Function, ParseError> {
    let mut names = NameSupply::default();
    for f in &functions {
        names.collect_function(f);
    }

    let mut done: HashMap<String, Function> = HashMap::new();
    let mut last = None;
    for f in functions {
        if done.contains_key(&f.name) {
            return Err(ParseError::new(f.span, ParseErrorKind::DuplicateFunction(f.name)));
        }
        ScopeChecker::new(&done).function(&f)?;
        let inlined = Inliner { callees: &done, names: &mut names }.function(f)?;
        last = Some(inlined.name.clone());
        done.insert(inlined.name.clone(), inlined);
    }
    let entry = last.ok_or_else(|| ParseError::new(Span::default(), ParseErrorKind::Empty))?;
    Ok(done.remove(&entry).expect("entry was inserted"))
}

#[derive(Default)]
struct NameSupply {
    taken: HashSet<String>,
}

impl NameSupply {
    fn collect_function(&mut self, f: &Function) {
        self.taken.insert(f.name.clone());
        for p in &f.params {
            self.taken.insert(p.name.clone());
        }
        self.collect_block(&f.body);
    }

    fn collect_block(&mut self, block: &[Stmt]) {
        for stmt in block {
            match &stmt.kind {
                StmtKind::Let { name, .. } | StmtKind::Assign { name, .. } => {
                    self.taken.insert(name.clone());
                }
                StmtKind::If { then_block, else_block, .. } => {
                    self.collect_block(then_block);
                    if let Some(else_block) = else_block {
                        self.collect_block(else_block);
                    }
                }
                StmtKind::While { body, .. } => self.collect_block(body),
                StmtKind::Return(_) => {}
            }
        }
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut n = 0usize;
        loop {
            let candidate = format!("{base}_{n}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            n += 1;
        }
    }
}

struct ScopeChecker<'a> {
    callees: &'a HashMap<String, Function>,
    scopes: Vec<HashSet<String>>,
}

impl<'a> ScopeChecker<'a> {
    fn new(callees: &'a HashMap<String, Function>) -> Self {
        ScopeChecker { callees, scopes: Vec::new() }
    }

    fn in_scope(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.contains(name))
    }

    fn function(&mut self, f: &Function) -> Result<(), ParseError> {
        self.scopes.push(f.params.iter().map(|p| p.name.clone()).collect());
        self.block(&f.body)?;
        self.scopes.pop();
        Ok(())
    }

    fn block(&mut self, block: &[Stmt]) -> Result<(), ParseError> {
        self.scopes.push(HashSet::new());
        for stmt in block {
            self.stmt(stmt)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), ParseError> {
        match &stmt.kind {
            StmtKind::Let { name, init, .. } => {
                self.expr(init)?;
                if self.in_scope(name) {
                    return Err(ParseError::new(stmt.span, ParseErrorKind::DuplicateVariable(name.clone())));
                }
                self.scopes.last_mut().expect("block scope").insert(name.clone());
            }
            StmtKind::Assign { name, value } => {
                self.expr(value)?;
                if !self.in_scope(name) {
                    return Err(ParseError::new(stmt.span, ParseErrorKind::UnknownVariable(name.clone())));
                }
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.expr(cond)?;
                self.block(then_block)?;
                if let Some(else_block) = else_block {
                    self.block(else_block)?;
                }
            }
            StmtKind::While { cond, body } => {
                if contains_call(cond) {
                    return Err(ParseError::new(cond.span, ParseErrorKind::CallInLoopCondition));
                }
                self.expr(cond)?;
                self.block(body)?;
            }
            StmtKind::Return(value) => self.expr(value)?,
        }
        Ok(())
    }

    fn expr(&self, e: &Expr) -> Result<(), ParseError> {
        match &e.kind {
            ExprKind::Lit { .. } => Ok(()),
            ExprKind::Var(name) if self.in_scope(name) => Ok(()),
            ExprKind::Var(name) => Err(ParseError::new(e.span, ParseErrorKind::UnknownVariable(name.clone()))),
            ExprKind::Cast(_, inner) | ExprKind::Unary(_, inner) => self.expr(inner),
            ExprKind::Binary(_, l, r) => {
                self.expr(l)?;
                self.expr(r)
            }
            ExprKind::Call(name, args) => {
                let callee = self
                    .callees
                    .get(name)
                    .ok_or_else(|| ParseError::new(e.span, ParseErrorKind::UnknownFunction(name.clone())))?;
                if callee.params.len() != args.len() {
                    return Err(ParseError::new(
                        e.span,
                        ParseErrorKind::Arity { name: name.clone(), expected: callee.params.len(), found: args.len() },
                    ));
                }
                args.iter().try_for_each(|a| self.expr(a))
            }
        }
    }
}

fn contains_call(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Call(..) => true,
        ExprKind::Lit { .. } | ExprKind::Var(_) => false,
        ExprKind::Cast(_, inner) | ExprKind::Unary(_, inner) => contains_call(inner),
        ExprKind::Binary(_, l, r) => contains_call(l) || contains_call(r),
    }
}

struct Inliner<'a> {
    callees: &'a HashMap<String, Function>,
    names: &'a mut NameSupply,
}

impl Inliner<'_> {
    fn function(&mut self, f: Function) -> Result<Function, ParseError> {
        let body = self.block(f.body)?;
        Ok(Function { body, ..f })
    }

    fn block(&mut self, block: Block) -> Result<Block, ParseError> {
        let mut out = Vec::with_capacity(block.len());
        for stmt in block {
            let span = stmt.span;
            let kind = match stmt.kind {
                StmtKind::Let { name, sort, init } => {
                    let init = self.hoist(init, &mut out)?;
                    StmtKind::Let { name, sort, init }
                }
                StmtKind::Assign { name, value } => {
                    let value = self.hoist(value, &mut out)?;
                    StmtKind::Assign { name, value }
                }
                StmtKind::Return(value) => StmtKind::Return(self.hoist(value, &mut out)?),
                StmtKind::If { cond, then_block, else_block } => {
                    let cond = self.hoist(cond, &mut out)?;
                    let then_block = self.block(then_block)?;
                    let else_block = else_block.map(|b| self.block(b)).transpose()?;
                    StmtKind::If { cond, then_block, else_block }
                }
                StmtKind::While { cond, body } => StmtKind::While { cond, body: self.block(body)? },
            };
            out.push(Stmt { kind, span });
        }
        Ok(out)
    }

    /// Replaces every call in `e` with a fresh temporary, appending the
    /// inlined callee bodies to `pre`.
    fn hoist(&mut self, e: Expr, pre: &mut Vec<Stmt>) -> Result<Expr, ParseError> {
        let span = e.span;
        let kind = match e.kind {
            ExprKind::Call(name, args) => {
                let args = args.into_iter().map(|a| self.hoist(a, pre)).collect::<Result<Vec<_>, _>>()?;
                let tmp = self.splice_call(&name, args, span, pre)?;
                ExprKind::Var(tmp)
            }
            ExprKind::Cast(sort, inner) => ExprKind::Cast(sort, Box::new(self.hoist(*inner, pre)?)),
            ExprKind::Unary(op, inner) => ExprKind::Unary(op, Box::new(self.hoist(*inner, pre)?)),
            ExprKind::Binary(op, l, r) => {
                let l = self.hoist(*l, pre)?;
                let r = self.hoist(*r, pre)?;
                ExprKind::Binary(op, Box::new(l), Box::new(r))
            }
            kind @ (ExprKind::Lit { .. } | ExprKind::Var(_)) => kind,
        };
        Ok(Expr { kind, span, ty: e.ty })
    }

    fn splice_call(
        &mut self,
        name: &str,
        args: Vec<Expr>,
        span: Span,
        pre: &mut Vec<Stmt>,
    ) -> Result<String, ParseError> {
        let callee = self.callees.get(name).expect("scope checker validated the call");
        if !always_returns(&callee.body) {
            return Err(ParseError::new(span, ParseErrorKind::CalleeNotTotal(name.to_string())));
        }
        if has_return_in_loop(&callee.body) {
            return Err(ParseError::new(span, ParseErrorKind::ReturnInLoop(name.to_string())));
        }

        let tmp = self.names.fresh(&format!("{name}_ret"));
        let mut renames = HashMap::new();
        for (param, arg) in callee.params.iter().zip(args) {
            let fresh = self.names.fresh(&format!("{name}_{}", param.name));
            renames.insert(param.name.clone(), fresh.clone());
            pre.push(Stmt { kind: StmtKind::Let { name: fresh, sort: param.sort, init: arg }, span });
        }
        pre.push(Stmt {
            kind: StmtKind::Let {
                name: tmp.clone(),
                sort: callee.ret,
                init: Expr::new(ExprKind::Lit { value: 0, hex: false }, span),
            },
            span,
        });
        let body = tailify(&callee.body);
        let mut renamer = Renamer { renames, names: &mut *self.names, prefix: name.to_string(), tmp: &tmp };
        pre.extend(renamer.block(body));
        Ok(tmp)
    }
}

fn has_return_in_loop(block: &[Stmt]) -> bool {
    block.iter().any(|stmt| match &stmt.kind {
        StmtKind::While { body, .. } => block_contains_return(body),
        StmtKind::If { then_block, else_block, .. } => {
            has_return_in_loop(then_block) || else_block.as_deref().is_some_and(has_return_in_loop)
        }
        _ => false,
    })
}

/// Rewrites `block` so that returns appear only in tail position: the
/// statements following an `if` that may return are pushed into both of its
/// branches, and anything after a `return` is dropped.
fn tailify(block: &[Stmt]) -> Block {
    let mut out = Vec::new();
    for (i, stmt) in block.iter().enumerate() {
        match &stmt.kind {
            StmtKind::Return(_) => {
                out.push(stmt.clone());
                return out;
            }
            StmtKind::If { cond, then_block, else_block } if stmt_contains_return(stmt) => {
                let rest = &block[i + 1..];
                let then_all: Block = then_block.iter().chain(rest).cloned().collect();
                let else_all: Block = else_block.iter().flatten().chain(rest).cloned().collect();
                out.push(Stmt {
                    kind: StmtKind::If {
                        cond: cond.clone(),
                        then_block: tailify(&then_all),
                        else_block: Some(tailify(&else_all)),
                    },
                    span: stmt.span,
                });
                return out;
            }
            _ => out.push(stmt.clone()),
        }
    }
    out
}

struct Renamer<'a> {
    renames: HashMap<String, String>,
    names: &'a mut NameSupply,
    prefix: String,
    tmp: &'a str,
}

impl Renamer<'_> {
    fn name(&mut self, name: &str) -> String {
        if let Some(n) = self.renames.get(name) {
            return n.clone();
        }
        let fresh = self.names.fresh(&format!("{}_{name}", self.prefix));
        self.renames.insert(name.to_string(), fresh.clone());
        fresh
    }

    fn block(&mut self, block: Block) -> Block {
        block.into_iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, stmt: Stmt) -> Stmt {
        let kind = match stmt.kind {
            StmtKind::Let { name, sort, init } => {
                let init = self.expr(init);
                StmtKind::Let { name: self.name(&name), sort, init }
            }
            StmtKind::Assign { name, value } => {
                let value = self.expr(value);
                StmtKind::Assign { name: self.name(&name), value }
            }
            StmtKind::If { cond, then_block, else_block } => StmtKind::If {
                cond: self.expr(cond),
                then_block: self.block(then_block),
                else_block: else_block.map(|b| self.block(b)),
            },
            StmtKind::While { cond, body } => StmtKind::While { cond: self.expr(cond), body: self.block(body) },
            StmtKind::Return(value) => StmtKind::Assign { name: self.tmp.to_string(), value: self.expr(value) },
        };
        Stmt { kind, span: stmt.span }
    }

    fn expr(&mut self, e: Expr) -> Expr {
        let kind = match e.kind {
            ExprKind::Var(name) => ExprKind::Var(self.name(&name)),
            ExprKind::Cast(sort, inner) => ExprKind::Cast(sort, Box::new(self.expr(*inner))),
            ExprKind::Unary(op, inner) => ExprKind::Unary(op, Box::new(self.expr(*inner))),
            ExprKind::Binary(op, l, r) => ExprKind::Binary(op, Box::new(self.expr(*l)), Box::new(self.expr(*r))),
            ExprKind::Call(..) => unreachable!("callees are inlined before they are spliced"),
            kind @ ExprKind::Lit { .. } => kind,
        };
        Expr { kind, span: e.span, ty: e.ty }
    }
}
