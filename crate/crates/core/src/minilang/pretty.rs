use std::fmt::Write;

use super::ast::{Expr, ExprKind, Function, Stmt, StmtKind, UnaryOp};

/// Renders `f` back to source text that parses to the same tree.
pub fn pretty_print(f: &Function) -> String {
    let mut out = String::new();
    let params: Vec<String> = f.params.iter().map(|p| format!("{}: {}", p.name, p.sort)).collect();
    let _ = writeln!(out, "fn {}({}) -> {} {{", f.name, params.join(", "), f.ret);
    for stmt in &f.body {
        write_stmt(&mut out, stmt, 1);
    }
    out.push_str("}\n");
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn write_block(out: &mut String, block: &[Stmt], depth: usize) {
    out.push_str("{\n");
    for stmt in block {
        write_stmt(out, stmt, depth + 1);
    }
    indent(out, depth);
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    indent(out, depth);
    match &stmt.kind {
        StmtKind::Let { name, sort, init } => {
            let _ = write!(out, "let {name}: {sort} = {};", expr_to_string(init));
        }
        StmtKind::Assign { name, value } => {
            let _ = write!(out, "{name} = {};", expr_to_string(value));
        }
        StmtKind::If { cond, then_block, else_block } => {
            let _ = write!(out, "if ({}) ", expr_to_string(cond));
            write_block(out, then_block, depth);
            if let Some(else_block) = else_block {
                out.push_str(" else ");
                write_block(out, else_block, depth);
            }
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", expr_to_string(cond));
            write_block(out, body, depth);
        }
        StmtKind::Return(value) => {
            let _ = write!(out, "return {};", expr_to_string(value));
        }
    }
    out.push('\n');
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_lit(out: &mut String, value: i128, hex: bool) {
    let sign = if value < 0 { "-" } else { "" };
    if hex {
        let _ = write!(out, "{sign}0x{:X}", value.unsigned_abs());
    } else {
        let _ = write!(out, "{sign}{}", value.unsigned_abs());
    }
}

fn write_operand(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Binary(..) | ExprKind::Lit { .. } => {
            out.push('(');
            write_expr(out, e);
            out.push(')');
        }
        _ => write_expr(out, e),
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Lit { value, hex } => write_lit(out, *value, *hex),
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Cast(sort, inner) => {
            let _ = write!(out, "({sort})");
            match &inner.kind {
                ExprKind::Binary(..) => write_operand(out, inner),
                _ => write_expr(out, inner),
            }
        }
        ExprKind::Unary(op, inner) => {
            out.push(match op {
                UnaryOp::Neg => '-',
                UnaryOp::BitNot => '~',
                UnaryOp::Not => '!',
            });
            if *op == UnaryOp::Neg || matches!(inner.kind, ExprKind::Binary(..)) {
                write_operand(out, inner);
            } else {
                write_expr(out, inner);
            }
        }
        ExprKind::Binary(op, l, r) => {
            let prec = op.precedence();
            let wrap_l = matches!(&l.kind, ExprKind::Binary(lop, ..) if lop.precedence() < prec);
            let wrap_r = matches!(&r.kind, ExprKind::Binary(rop, ..) if rop.precedence() <= prec);
            wrap(out, l, wrap_l);
            let _ = write!(out, " {} ", op.symbol());
            wrap(out, r, wrap_r);
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a);
            }
            out.push(')');
        }
    }
}

fn wrap(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}
