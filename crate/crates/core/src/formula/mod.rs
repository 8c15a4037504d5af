//! Quantifier-free bit-vector terms and formulas, their concrete
//! semantics, and SMT-LIB serialization.

pub mod bv;
mod error;
mod range;
pub mod smtlib;
mod term;

pub use error::FormulaError;
pub use range::{iff_under_range, mk_range_constraint, range_vector_constraint, RangePair};
pub use smtlib::serialize;
pub use term::{Assignment, BinOp, BvVar, CmpOp, Formula, Role, Term, TermNode, UnOp};

/// Checks that every free variable of `f` is declared in `decls` at the
/// width it is used with.
pub fn check_declared(decls: &[BvVar], f: &Formula) -> Result<(), FormulaError> {
    for (name, width) in f.free_vars() {
        if !decls.iter().any(|d| d.name == name && d.width() == width) {
            return Err(FormulaError::Undeclared(name, width));
        }
    }
    Ok(())
}
