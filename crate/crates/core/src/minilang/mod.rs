//! The analysed mini-language: a fixed-width integer subset of C with
//! `let`, assignment, `if`/`else`, bounded `while` and `return`.
//!
//! A source file holds one or more functions. The last one is the entry
//! point; calls to earlier functions are inlined during [`parse`].

mod ast;
mod error;
mod inline;
mod lexer;
mod parser;
mod pretty;
mod sort;
mod typeck;

pub use ast::{always_returns, BinaryOp, Block, Expr, ExprKind, Function, Param, Span, Stmt, StmtKind, Ty, UnaryOp};
pub use error::{ParseError, ParseErrorKind, TypeError, TypeErrorKind};
pub use pretty::{expr_to_string, pretty_print};
pub use sort::{mask, sign_extend, IntSort, Signedness};
pub use typeck::{typecheck, typecheck_with, TypecheckOptions, TypedFunction};

use thiserror::Error;

/// Parses `src` into its entry function with every call inlined.
pub fn parse(src: &str) -> Result<Function, ParseError> {
    let functions = parser::parse_functions(src)?;
    inline::resolve_and_inline(functions)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// `parse` followed by `typecheck`.
pub fn load(src: &str) -> Result<TypedFunction, LoadError> {
    Ok(typecheck(parse(src)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_folded_constant_guard() {
        let f = parse("fn f(x: u32) -> i32 { if (x >= 268435455) { return -22; } return 0; }").unwrap();
        assert_eq!(f.params.len(), 1);
        assert_eq!(f.params[0].sort, IntSort::U32);
        assert_eq!(f.ret, IntSort::I32);
        assert_eq!(f.body.len(), 2);
        typecheck(f).unwrap();
    }

    #[test]
    fn identity() {
        let f = load("fn id(x: i8) -> i8 { return x; }").unwrap();
        assert_eq!(f.name, "id");
        assert!(matches!(&f.body[0].kind, StmtKind::Return(e) if e.sort() == IntSort::I8));
    }

    #[test]
    fn unknown_variable_is_a_parse_error() {
        let err = parse("fn f(x: i32) -> i32 { return y; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVariable("y".into()));
    }

    #[test]
    fn block_scoping() {
        let err = parse("fn f(x: i32) -> i32 { if (x > 0) { let t: i32 = 1; } return t; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVariable("t".into()));
        let err = parse("fn f(x: i32) -> i32 { let x: i32 = 1; return x; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateVariable("x".into()));
        parse("fn f(x: i32) -> i32 { if (x > 0) { let t: i32 = 1; } else { let t: i32 = 2; } return x; }").unwrap();
    }

    #[test]
    fn mixed_sorts_need_a_cast() {
        let err = load("fn f(x: i32, y: u32) -> i32 { return x + y; }").unwrap_err();
        assert!(matches!(err, LoadError::Type(TypeError { kind: TypeErrorKind::SortMismatch { .. }, .. })));
        load("fn f(x: i32, y: u32) -> i32 { return x + (i32)y; }").unwrap();
        let err = load("fn f(x: i32, y: u32) -> i32 { if (x < y) { return 1; } return 0; }").unwrap_err();
        assert!(matches!(err, LoadError::Type(TypeError { kind: TypeErrorKind::SortMismatch { .. }, .. })));
    }

    #[test]
    fn missing_return_on_else_branch() {
        let err = load("fn f(x: i32) -> i32 { if (x > 0) { return 1; } else { x = 2; } }").unwrap_err();
        assert!(matches!(err, LoadError::Type(TypeError { kind: TypeErrorKind::MissingReturn(_), .. })));
        let err = load("fn f(x: i32) -> i32 { while (x > 0) { return 1; } }").unwrap_err();
        assert!(matches!(err, LoadError::Type(TypeError { kind: TypeErrorKind::MissingReturn(_), .. })));
    }

    #[test]
    fn tcp_window_guard_is_well_typed() {
        load("fn f(val: i32) -> i32 { if (val < 8 || val > 32767) { return -22; } return val; }").unwrap();
    }

    #[test]
    fn literal_ranges() {
        assert!(load("fn f(x: u8) -> u8 { return -1; }").is_err());
        assert!(load("fn f(x: i8) -> i8 { return 128; }").is_err());
        load("fn f(x: i8) -> i8 { return 0xFF; }").unwrap();
        load("fn f(x: i8) -> i8 { return -128; }").unwrap();
        load("fn f(x: u32) -> u32 { return (u32)-1; }").unwrap();
    }

    #[test]
    fn booleans_stay_in_conditions() {
        assert!(load("fn f(x: i8) -> i8 { return x < 1; }").is_err());
        assert!(load("fn f(x: i8) -> i8 { if (x) { return 1; } return 0; }").is_err());
        load("fn f(x: i8) -> i8 { if (!(x < 1) && x != 3) { return 1; } return 0; }").unwrap();
    }

    #[test]
    fn division_can_be_rejected() {
        let f = parse("fn f(x: i8) -> i8 { return 10 / x; }").unwrap();
        typecheck(f.clone()).unwrap();
        let err = typecheck_with(f, TypecheckOptions { reject_division: true }).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::DivisionRejected);
    }

    #[test]
    fn inlines_calls_with_early_returns() {
        let src = "
            fn lib(x: i32) -> i32 { if (x < 5) { return 5; } return x; }
            fn client(x: i32) -> i32 {
                if (x < 0) { return -lib((-x) * 5) / 5; }
                return lib((x + 1) * 5) / 5 - 1;
            }";
        let f = load(src).unwrap();
        assert_eq!(f.name, "client");
        let text = pretty_print(&f);
        assert!(!text.contains("lib("), "{text}");
        // The inlined form is ordinary source again.
        assert_eq!(parse(&text).unwrap(), f.function().clone().strip_types());
    }

    #[test]
    fn call_errors() {
        let err = parse("fn f(x: i8) -> i8 { return g(x); } fn g(x: i8) -> i8 { return x; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("g".into()));
        let err = parse("fn g(x: i8) -> i8 { return x; } fn f(x: i8) -> i8 { return g(x, x); }").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 1, found: 2, .. }));
        let err = parse("fn f(x: i8) -> i8 { return f(x); }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("f".into()));
        let err =
            parse("fn g(x: i8) -> i8 { return x; } fn f(x: i8) -> i8 { while (g(x) > 0) { x = x - 1; } return x; }")
                .unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::CallInLoopCondition);
    }

    #[test]
    fn pretty_round_trip() {
        let src = "fn f(x: i16, y: i16) -> i16 {
            let t: i16 = -(x - -3) * (y + 1) << 2;
            if (x < 0 || !(y == 0x7F) && x >= y) { t = ~t ^ (x | y & 5); } else { t = t % 7 / (i16)(u8)y; }
            while (t > 100) { t = t - 100; }
            return t - (x - y);
        }";
        let f = parse(src).unwrap();
        let printed = pretty_print(&f);
        assert_eq!(parse(&printed).unwrap(), f, "{printed}");
    }
}
