//! Path-by-path symbolic execution of a typed function into a summary
//! `∨ (path condition ∧ out = return term)` over inputs and one output.

mod concrete;
mod symbolic;

pub use concrete::{eval_concrete, Value};
pub use symbolic::{output_name, PathPruner};

use serde::Serialize;
use thiserror::Error;

use crate::formula::{self, Assignment, BvVar, Formula, Term};
use crate::minilang::{Span, TypedFunction};

pub const DEFAULT_UNROLL_LIMIT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SummarizeError {
    #[error("loop at {span} still runs after {limit} iterations")]
    UnrollLimitExceeded { limit: u32, span: Span },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("loop still runs after {limit} iterations")]
    UnrollLimitExceeded { limit: u32 },
    #[error("expected {expected} inputs, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("value {value} is outside the sort of parameter {param}")]
    OutOfRange { param: String, value: i128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum SignatureError {
    #[error("parameter lists differ: ({0}) vs ({1})")]
    Params(String, String),
    #[error("return sorts differ: {0} vs {1}")]
    Return(String, String),
}

/// Both versions of a pair must take the same parameters (names and sorts)
/// and return the same sort.
pub fn check_signatures(f1: &TypedFunction, f2: &TypedFunction) -> Result<(), SignatureError> {
    let show =
        |f: &TypedFunction| f.params.iter().map(|p| format!("{}: {}", p.name, p.sort)).collect::<Vec<_>>().join(", ");
    if f1.params != f2.params {
        return Err(SignatureError::Params(show(f1), show(f2)));
    }
    if f1.ret != f2.ret {
        return Err(SignatureError::Return(f1.ret.to_string(), f2.ret.to_string()));
    }
    Ok(())
}

/// One feasible path: its condition over the inputs and its return term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub path: Formula,
    pub ret: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub inputs: Vec<BvVar>,
    pub output: BvVar,
    pub disjuncts: Vec<Disjunct>,
}

impl Summary {
    pub fn path_count(&self) -> usize {
        self.disjuncts.len()
    }

    /// Inputs followed by the output.
    pub fn decls(&self) -> Vec<BvVar> {
        let mut decls = self.inputs.clone();
        decls.push(self.output.clone());
        decls
    }

    pub fn formula(&self) -> Formula {
        let out = self.output.term();
        Formula::or(
            self.disjuncts.iter().map(|d| Formula::and([d.path.clone(), Formula::eq(out.clone(), d.ret.clone())])),
        )
    }

    /// The SMT-LIB script asserting the summary.
    pub fn to_smtlib(&self) -> String {
        formula::serialize(&self.decls(), &self.formula())
    }

    pub fn same_variables(&self, other: &Summary) -> bool {
        self.inputs == other.inputs && self.output == other.output
    }

    /// Output bits on `input` (bit patterns keyed by name), read off the
    /// unique disjunct whose path condition holds.
    pub fn eval(&self, input: &Assignment) -> Option<u64> {
        let mut hit = None;
        for d in &self.disjuncts {
            if d.path.eval_with(input)? {
                if hit.is_some() {
                    return None;
                }
                hit = Some(d.ret.eval(&|n| input.get(n).copied())?);
            }
        }
        hit
    }
}

pub fn summarize(f: &TypedFunction, unroll_limit: u32) -> Result<Summary, SummarizeError> {
    symbolic::summarize_with(f, unroll_limit, None)
}

/// `summarize`, dropping branches `pruner` proves infeasible.
pub fn summarize_pruned(
    f: &TypedFunction,
    unroll_limit: u32,
    pruner: &mut dyn PathPruner,
) -> Result<Summary, SummarizeError> {
    symbolic::summarize_with(f, unroll_limit, Some(pruner))
}
