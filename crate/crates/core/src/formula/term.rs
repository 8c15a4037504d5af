use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bv;
use crate::minilang::IntSort;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
}

/// A free bit-vector constant of a summary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BvVar {
    pub name: String,
    pub sort: IntSort,
    pub role: Role,
}

impl BvVar {
    pub fn input(name: impl Into<String>, sort: IntSort) -> BvVar {
        BvVar { name: name.into(), sort, role: Role::Input }
    }

    pub fn output(name: impl Into<String>, sort: IntSort) -> BvVar {
        BvVar { name: name.into(), sort, role: Role::Output }
    }

    pub fn width(&self) -> u32 {
        self.sort.width()
    }

    pub fn term(&self) -> Term {
        Term::var(&self.name, self.width())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Udiv,
    Sdiv,
    Urem,
    Srem,
    Shl,
    Lshr,
    Ashr,
    And,
    Or,
    Xor,
}

impl BinOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            BinOp::Add => "bvadd",
            BinOp::Sub => "bvsub",
            BinOp::Mul => "bvmul",
            BinOp::Udiv => "bvudiv",
            BinOp::Sdiv => "bvsdiv",
            BinOp::Urem => "bvurem",
            BinOp::Srem => "bvsrem",
            BinOp::Shl => "bvshl",
            BinOp::Lshr => "bvlshr",
            BinOp::Ashr => "bvashr",
            BinOp::And => "bvand",
            BinOp::Or => "bvor",
            BinOp::Xor => "bvxor",
        }
    }

    pub fn apply(self, width: u32, a: u64, b: u64) -> u64 {
        match self {
            BinOp::Add => bv::add(width, a, b),
            BinOp::Sub => bv::sub(width, a, b),
            BinOp::Mul => bv::mul(width, a, b),
            BinOp::Udiv => bv::udiv(width, a, b),
            BinOp::Sdiv => bv::sdiv(width, a, b),
            BinOp::Urem => bv::urem(width, a, b),
            BinOp::Srem => bv::srem(width, a, b),
            BinOp::Shl => bv::shl(width, a, b),
            BinOp::Lshr => bv::lshr(width, a, b),
            BinOp::Ashr => bv::ashr(width, a, b),
            BinOp::And => a & b,
            BinOp::Or => a | b,
            BinOp::Xor => a ^ b,
        }
    }
}

impl UnOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            UnOp::Neg => "bvneg",
            UnOp::Not => "bvnot",
        }
    }

    pub fn apply(self, width: u32, a: u64) -> u64 {
        match self {
            UnOp::Neg => bv::neg(width, a),
            UnOp::Not => bv::not(width, a),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum TermNode {
    Const(u64),
    Var(String),
    Unary(UnOp, Term),
    Binary(BinOp, Term, Term),
    ZeroExtend(u32, Term),
    SignExtend(u32, Term),
    Extract { hi: u32, lo: u32, arg: Term },
}

/// A bit-vector term. Cheap to clone; subterms are shared.
///
/// The constructors fold operations on constants and panic on width
/// mismatches, so every `Term` in existence is well-sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    width: u32,
    node: Arc<TermNode>,
}

impl Term {
    fn mk(width: u32, node: TermNode) -> Term {
        Term { width, node: Arc::new(node) }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn node(&self) -> &TermNode {
        &self.node
    }

    pub fn constant(width: u32, bits: u64) -> Term {
        Term::mk(width, TermNode::Const(bits & crate::minilang::mask(width)))
    }

    /// The constant of `sort` holding `value`, reduced modulo `2^width`.
    pub fn int(sort: IntSort, value: i128) -> Term {
        Term::constant(sort.width(), sort.wrap_int(value))
    }

    pub fn var(name: &str, width: u32) -> Term {
        Term::mk(width, TermNode::Var(name.to_string()))
    }

    pub fn as_const(&self) -> Option<u64> {
        match *self.node {
            TermNode::Const(bits) => Some(bits),
            _ => None,
        }
    }

    pub fn unary(op: UnOp, arg: Term) -> Term {
        match arg.as_const() {
            Some(a) => Term::constant(arg.width, op.apply(arg.width, a)),
            None => Term::mk(arg.width, TermNode::Unary(op, arg)),
        }
    }

    pub fn binary(op: BinOp, lhs: Term, rhs: Term) -> Term {
        assert_eq!(lhs.width, rhs.width, "{} operands differ in width", op.smt_name());
        let width = lhs.width;
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Term::constant(width, op.apply(width, a, b)),
            _ => Term::mk(width, TermNode::Binary(op, lhs, rhs)),
        }
    }

    pub fn zero_extend(arg: Term, to_width: u32) -> Term {
        assert!(to_width >= arg.width);
        if to_width == arg.width {
            return arg;
        }
        match arg.as_const() {
            Some(a) => Term::constant(to_width, bv::zero_extend(to_width, a)),
            None => Term::mk(to_width, TermNode::ZeroExtend(to_width - arg.width, arg)),
        }
    }

    pub fn sign_extend(arg: Term, to_width: u32) -> Term {
        assert!(to_width >= arg.width);
        if to_width == arg.width {
            return arg;
        }
        match arg.as_const() {
            Some(a) => Term::constant(to_width, bv::sign_extend_to(arg.width, to_width, a)),
            None => Term::mk(to_width, TermNode::SignExtend(to_width - arg.width, arg)),
        }
    }

    pub fn extract(arg: Term, hi: u32, lo: u32) -> Term {
        assert!(lo <= hi && hi < arg.width);
        if lo == 0 && hi + 1 == arg.width {
            return arg;
        }
        match arg.as_const() {
            Some(a) => Term::constant(hi - lo + 1, bv::extract(hi, lo, a)),
            None => Term::mk(hi - lo + 1, TermNode::Extract { hi, lo, arg }),
        }
    }

    /// C-style conversion of a value of sort `from` to sort `to`: narrowing
    /// truncates, widening extends according to the signedness of `from`.
    pub fn cast(arg: Term, from: IntSort, to: IntSort) -> Term {
        use std::cmp::Ordering;
        match to.width().cmp(&from.width()) {
            Ordering::Equal => arg,
            Ordering::Less => Term::extract(arg, to.width() - 1, 0),
            Ordering::Greater if from.is_signed() => Term::sign_extend(arg, to.width()),
            Ordering::Greater => Term::zero_extend(arg, to.width()),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Term) -> Term {
        Term::binary(BinOp::Add, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Term) -> Term {
        Term::binary(BinOp::Sub, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Term) -> Term {
        Term::binary(BinOp::Mul, self, rhs)
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<u64>) -> Option<u64> {
        let w = self.width;
        Some(match &*self.node {
            TermNode::Const(bits) => *bits,
            TermNode::Var(name) => env(name)? & crate::minilang::mask(w),
            TermNode::Unary(op, a) => op.apply(w, a.eval(env)?),
            TermNode::Binary(op, a, b) => op.apply(w, a.eval(env)?, b.eval(env)?),
            TermNode::ZeroExtend(_, a) => bv::zero_extend(w, a.eval(env)?),
            TermNode::SignExtend(_, a) => bv::sign_extend_to(a.width, w, a.eval(env)?),
            TermNode::Extract { hi, lo, arg } => bv::extract(*hi, *lo, arg.eval(env)?),
        })
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeMap<String, u32>) {
        match &*self.node {
            TermNode::Const(_) => {}
            TermNode::Var(name) => {
                out.insert(name.clone(), self.width);
            }
            TermNode::Unary(_, a) | TermNode::ZeroExtend(_, a) | TermNode::SignExtend(_, a) => a.collect_vars(out),
            TermNode::Extract { arg, .. } => arg.collect_vars(out),
            TermNode::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::smtlib::term_to_smt(self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ult,
    Ule,
    Slt,
    Sle,
}

impl CmpOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ult => "bvult",
            CmpOp::Ule => "bvule",
            CmpOp::Slt => "bvslt",
            CmpOp::Sle => "bvsle",
        }
    }

    pub fn apply(self, width: u32, a: u64, b: u64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ult => bv::ult(a, b),
            CmpOp::Ule => bv::ule(a, b),
            CmpOp::Slt => bv::slt(width, a, b),
            CmpOp::Sle => bv::sle(width, a, b),
        }
    }
}

/// Quantifier-free boolean structure over bit-vector atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Cmp(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::Const(true)
    }

    pub fn ff() -> Formula {
        Formula::Const(false)
    }

    pub fn as_const(&self) -> Option<bool> {
        match self {
            Formula::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub fn cmp(op: CmpOp, lhs: Term, rhs: Term) -> Formula {
        assert_eq!(lhs.width(), rhs.width(), "{} operands differ in width", op.smt_name());
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Formula::Const(op.apply(lhs.width(), a, b)),
            _ => Formula::Cmp(op, lhs, rhs),
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::cmp(CmpOp::Eq, lhs, rhs)
    }

    /// `lhs < rhs` under the signedness of `sort`.
    pub fn lt(sort: IntSort, lhs: Term, rhs: Term) -> Formula {
        let op = if sort.is_signed() { CmpOp::Slt } else { CmpOp::Ult };
        Formula::cmp(op, lhs, rhs)
    }

    /// `lhs <= rhs` under the signedness of `sort`.
    pub fn le(sort: IntSort, lhs: Term, rhs: Term) -> Formula {
        let op = if sort.is_signed() { CmpOp::Sle } else { CmpOp::Ule };
        Formula::cmp(op, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::Const(b) => Formula::Const(!b),
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::Const(true) => {}
                Formula::Const(false) => return Formula::ff(),
                Formula::And(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::tt(),
            1 => out.pop().expect("one item"),
            _ => Formula::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::Const(false) => {}
                Formula::Const(true) => return Formula::tt(),
                Formula::Or(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::ff(),
            1 => out.pop().expect("one item"),
            _ => Formula::Or(out),
        }
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<u64>) -> Option<bool> {
        Some(match self {
            Formula::Const(b) => *b,
            Formula::Cmp(op, a, b) => op.apply(a.width(), a.eval(env)?, b.eval(env)?),
            Formula::Not(f) => !f.eval(env)?,
            Formula::And(items) => {
                for f in items {
                    if !f.eval(env)? {
                        return Some(false);
                    }
                }
                true
            }
            Formula::Or(items) => {
                for f in items {
                    if f.eval(env)? {
                        return Some(true);
                    }
                }
                false
            }
            Formula::Iff(a, b) => a.eval(env)? == b.eval(env)?,
            Formula::Implies(a, b) => !a.eval(env)? || b.eval(env)?,
        })
    }

    /// Evaluates under a name-to-bits map; `None` if a variable is unbound.
    pub fn eval_with(&self, env: &Assignment) -> Option<bool> {
        self.eval(&|name| env.get(name).copied())
    }

    /// Free variables with their widths.
    pub fn free_vars(&self) -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, u32>) {
        match self {
            Formula::Const(_) => {}
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(items) | Formula::Or(items) => items.iter().for_each(|f| f.collect_vars(out)),
            Formula::Iff(a, b) | Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::smtlib::formula_to_smt(self))
    }
}

/// Variable name to bit pattern.
pub type Assignment = BTreeMap<String, u64>;
