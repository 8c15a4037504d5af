//! SMT-LIB v2 text for terms and formulas in the QF_BV logic.

use std::fmt::Write;

use super::term::{BvVar, Formula, Term, TermNode};

/// SMT-LIB symbols that a mini-language identifier could collide with.
const RESERVED: &[&str] = &[
    "true",
    "false",
    "not",
    "and",
    "or",
    "xor",
    "ite",
    "distinct",
    "let",
    "par",
    "as",
    "exists",
    "forall",
    "match",
    "concat",
    "extract",
    "repeat",
    "zero_extend",
    "sign_extend",
    "rotate_left",
    "rotate_right",
];

/// `name`, quoted with `|...|` when it could be mistaken for a theory symbol.
pub fn symbol(name: &str) -> String {
    if RESERVED.contains(&name) || name.starts_with("bv") {
        format!("|{name}|")
    } else {
        name.to_string()
    }
}

/// A `#x` literal of `width` bits.
pub fn literal(width: u32, bits: u64) -> String {
    format!("#x{:0digits$x}", bits, digits = (width / 4) as usize)
}

pub fn sort_to_smt(width: u32) -> String {
    format!("(_ BitVec {width})")
}

pub fn declaration(var: &BvVar) -> String {
    format!("(declare-const {} {})", symbol(&var.name), sort_to_smt(var.width()))
}

pub fn term_to_smt(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

pub fn formula_to_smt(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

/// A self-contained script: logic, one declaration per variable in the
/// given order, and one assertion.
pub fn serialize(decls: &[BvVar], f: &Formula) -> String {
    let mut out = String::from("(set-logic QF_BV)\n");
    for var in decls {
        out.push_str(&declaration(var));
        out.push('\n');
    }
    out.push_str("(assert ");
    write_formula(&mut out, f);
    out.push_str(")\n");
    out
}

fn write_term(out: &mut String, t: &Term) {
    match t.node() {
        TermNode::Const(bits) => out.push_str(&literal(t.width(), *bits)),
        TermNode::Var(name) => out.push_str(&symbol(name)),
        TermNode::Unary(op, a) => {
            let _ = write!(out, "({} ", op.smt_name());
            write_term(out, a);
            out.push(')');
        }
        TermNode::Binary(op, a, b) => {
            let _ = write!(out, "({} ", op.smt_name());
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push(')');
        }
        TermNode::ZeroExtend(k, a) => {
            let _ = write!(out, "((_ zero_extend {k}) ");
            write_term(out, a);
            out.push(')');
        }
        TermNode::SignExtend(k, a) => {
            let _ = write!(out, "((_ sign_extend {k}) ");
            write_term(out, a);
            out.push(')');
        }
        TermNode::Extract { hi, lo, arg } => {
            let _ = write!(out, "((_ extract {hi} {lo}) ");
            write_term(out, arg);
            out.push(')');
        }
    }
}

fn write_list(out: &mut String, head: &str, items: &[Formula]) {
    let _ = write!(out, "({head}");
    for f in items {
        out.push(' ');
        write_formula(out, f);
    }
    out.push(')');
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Const(true) => out.push_str("true"),
        Formula::Const(false) => out.push_str("false"),
        Formula::Cmp(op, a, b) => {
            let _ = write!(out, "({} ", op.smt_name());
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push(')');
        }
        Formula::Not(inner) => {
            out.push_str("(not ");
            write_formula(out, inner);
            out.push(')');
        }
        Formula::And(items) => write_list(out, "and", items),
        Formula::Or(items) => write_list(out, "or", items),
        Formula::Iff(a, b) => write_list(out, "=", &[(**a).clone(), (**b).clone()]),
        Formula::Implies(a, b) => write_list(out, "=>", &[(**a).clone(), (**b).clone()]),
    }
}
