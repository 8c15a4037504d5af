//! Reference interpreter over native Rust integers. It shares no code with
//! the bit-vector evaluator in `formula`, so the two can check each other.

use std::collections::HashMap;

use super::EvalError;
use crate::minilang::{BinaryOp, Expr, ExprKind, IntSort, Signedness, Stmt, StmtKind, TypedFunction, UnaryOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    I8(i8),
    I16(i16),
    I32(i32),
    I64(i64),
    U8(u8),
    U16(u16),
    U32(u32),
    U64(u64),
}

/// Total division, remainder and shifts matching the bit-vector theory.
trait Native: Copy {
    fn div_total(self, rhs: Self) -> Self;
    fn rem_total(self, rhs: Self) -> Self;
    fn shl_total(self, rhs: Self) -> Self;
    fn shr_total(self, rhs: Self) -> Self;
}

macro_rules! native_unsigned {
    ($($t:ty),*) => {$(
        impl Native for $t {
            fn div_total(self, rhs: Self) -> Self {
                if rhs == 0 { <$t>::MAX } else { self / rhs }
            }
            fn rem_total(self, rhs: Self) -> Self {
                if rhs == 0 { self } else { self % rhs }
            }
            fn shl_total(self, rhs: Self) -> Self {
                u32::try_from(rhs).ok().and_then(|s| self.checked_shl(s)).unwrap_or(0)
            }
            fn shr_total(self, rhs: Self) -> Self {
                u32::try_from(rhs).ok().and_then(|s| self.checked_shr(s)).unwrap_or(0)
            }
        }
    )*};
}

macro_rules! native_signed {
    ($($t:ty),*) => {$(
        impl Native for $t {
            fn div_total(self, rhs: Self) -> Self {
                match rhs {
                    0 if self >= 0 => -1,
                    0 => 1,
                    _ => self.wrapping_div(rhs),
                }
            }
            fn rem_total(self, rhs: Self) -> Self {
                if rhs == 0 { self } else { self.wrapping_rem(rhs) }
            }
            fn shl_total(self, rhs: Self) -> Self {
                // the amount is read as unsigned: negative amounts are huge
                u32::try_from(rhs).ok().and_then(|s| self.checked_shl(s)).unwrap_or(0)
            }
            fn shr_total(self, rhs: Self) -> Self {
                let fill = if self < 0 { -1 } else { 0 };
                u32::try_from(rhs).ok().and_then(|s| self.checked_shr(s)).unwrap_or(fill)
            }
        }
    )*};
}

native_unsigned!(u8, u16, u32, u64);
native_signed!(i8, i16, i32, i64);

macro_rules! lift2 {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $e:expr) => {
        match ($a, $b) {
            (Value::I8($x), Value::I8($y)) => Value::I8($e),
            (Value::I16($x), Value::I16($y)) => Value::I16($e),
            (Value::I32($x), Value::I32($y)) => Value::I32($e),
            (Value::I64($x), Value::I64($y)) => Value::I64($e),
            (Value::U8($x), Value::U8($y)) => Value::U8($e),
            (Value::U16($x), Value::U16($y)) => Value::U16($e),
            (Value::U32($x), Value::U32($y)) => Value::U32($e),
            (Value::U64($x), Value::U64($y)) => Value::U64($e),
            (a, b) => panic!("operands of different sorts: {a:?}, {b:?}"),
        }
    };
}

macro_rules! test2 {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $e:expr) => {
        match ($a, $b) {
            (Value::I8($x), Value::I8($y)) => $e,
            (Value::I16($x), Value::I16($y)) => $e,
            (Value::I32($x), Value::I32($y)) => $e,
            (Value::I64($x), Value::I64($y)) => $e,
            (Value::U8($x), Value::U8($y)) => $e,
            (Value::U16($x), Value::U16($y)) => $e,
            (Value::U32($x), Value::U32($y)) => $e,
            (Value::U64($x), Value::U64($y)) => $e,
            (a, b) => panic!("operands of different sorts: {a:?}, {b:?}"),
        }
    };
}

macro_rules! lift1 {
    ($a:expr, |$x:ident| $e:expr) => {
        match $a {
            Value::I8($x) => Value::I8($e),
            Value::I16($x) => Value::I16($e),
            Value::I32($x) => Value::I32($e),
            Value::I64($x) => Value::I64($e),
            Value::U8($x) => Value::U8($e),
            Value::U16($x) => Value::U16($e),
            Value::U32($x) => Value::U32($e),
            Value::U64($x) => Value::U64($e),
        }
    };
}

macro_rules! convert {
    ($v:expr, $t:ty) => {
        match $v {
            Value::I8(x) => x as $t,
            Value::I16(x) => x as $t,
            Value::I32(x) => x as $t,
            Value::I64(x) => x as $t,
            Value::U8(x) => x as $t,
            Value::U16(x) => x as $t,
            Value::U32(x) => x as $t,
            Value::U64(x) => x as $t,
        }
    };
}

impl Value {
    /// `value` reduced modulo `2^width` into `sort`.
    pub fn wrap(sort: IntSort, value: i128) -> Value {
        match (sort.signedness(), sort.width()) {
            (Signedness::Signed, 8) => Value::I8(value as i8),
            (Signedness::Signed, 16) => Value::I16(value as i16),
            (Signedness::Signed, 32) => Value::I32(value as i32),
            (Signedness::Signed, _) => Value::I64(value as i64),
            (Signedness::Unsigned, 8) => Value::U8(value as u8),
            (Signedness::Unsigned, 16) => Value::U16(value as u16),
            (Signedness::Unsigned, 32) => Value::U32(value as u32),
            (Signedness::Unsigned, _) => Value::U64(value as u64),
        }
    }

    pub fn sort(self) -> IntSort {
        match self {
            Value::I8(_) => IntSort::I8,
            Value::I16(_) => IntSort::I16,
            Value::I32(_) => IntSort::I32,
            Value::I64(_) => IntSort::I64,
            Value::U8(_) => IntSort::U8,
            Value::U16(_) => IntSort::U16,
            Value::U32(_) => IntSort::U32,
            Value::U64(_) => IntSort::U64,
        }
    }

    pub fn to_i128(self) -> i128 {
        convert!(self, i128)
    }

    /// Two's-complement bit pattern, zero-extended to 64 bits.
    pub fn bits(self) -> u64 {
        self.to_i128() as u64 & self.sort().mask()
    }

    /// C conversion: `as` between Rust integers has exactly those rules.
    pub fn cast(self, to: IntSort) -> Value {
        match (to.signedness(), to.width()) {
            (Signedness::Signed, 8) => Value::I8(convert!(self, i8)),
            (Signedness::Signed, 16) => Value::I16(convert!(self, i16)),
            (Signedness::Signed, 32) => Value::I32(convert!(self, i32)),
            (Signedness::Signed, _) => Value::I64(convert!(self, i64)),
            (Signedness::Unsigned, 8) => Value::U8(convert!(self, u8)),
            (Signedness::Unsigned, 16) => Value::U16(convert!(self, u16)),
            (Signedness::Unsigned, 32) => Value::U32(convert!(self, u32)),
            (Signedness::Unsigned, _) => Value::U64(convert!(self, u64)),
        }
    }
}

/// Runs `f` on `input` (one value per parameter, in the parameter's range).
pub fn eval_concrete(f: &TypedFunction, input: &[i128], unroll_limit: u32) -> Result<Value, EvalError> {
    if input.len() != f.params.len() {
        return Err(EvalError::Arity { expected: f.params.len(), found: input.len() });
    }
    let mut env = HashMap::new();
    for (p, &v) in f.params.iter().zip(input) {
        if !p.sort.contains(v) {
            return Err(EvalError::OutOfRange { param: p.name.clone(), value: v });
        }
        env.insert(p.name.clone(), Value::wrap(p.sort, v));
    }
    let mut interp = Interp { env, unroll_limit };
    match interp.block(&f.body)? {
        Some(v) => Ok(v),
        None => unreachable!("a type-checked function returns on every path"),
    }
}

struct Interp {
    env: HashMap<String, Value>,
    unroll_limit: u32,
}

impl Interp {
    fn block(&mut self, block: &[Stmt]) -> Result<Option<Value>, EvalError> {
        for stmt in block {
            if let Some(v) = self.stmt(stmt)? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<Option<Value>, EvalError> {
        match &stmt.kind {
            StmtKind::Let { name, init: value, .. } | StmtKind::Assign { name, value } => {
                let v = self.expr(value);
                self.env.insert(name.clone(), v);
                Ok(None)
            }
            StmtKind::Return(value) => Ok(Some(self.expr(value))),
            StmtKind::If { cond, then_block, else_block } => {
                if self.cond(cond) {
                    self.block(then_block)
                } else if let Some(else_block) = else_block {
                    self.block(else_block)
                } else {
                    Ok(None)
                }
            }
            StmtKind::While { cond, body } => {
                let mut done = 0;
                while self.cond(cond) {
                    if done >= self.unroll_limit {
                        return Err(EvalError::UnrollLimitExceeded { limit: self.unroll_limit });
                    }
                    done += 1;
                    if let Some(v) = self.block(body)? {
                        return Ok(Some(v));
                    }
                }
                Ok(None)
            }
        }
    }

    fn expr(&self, e: &Expr) -> Value {
        match &e.kind {
            ExprKind::Lit { value, .. } => Value::wrap(e.sort(), *value),
            ExprKind::Var(name) => self.env[name],
            ExprKind::Cast(to, inner) => self.expr(inner).cast(*to),
            ExprKind::Unary(UnaryOp::Neg, inner) => lift1!(self.expr(inner), |x| x.wrapping_neg()),
            ExprKind::Unary(UnaryOp::BitNot, inner) => lift1!(self.expr(inner), |x| !x),
            ExprKind::Binary(op, l, r) => {
                let (a, b) = (self.expr(l), self.expr(r));
                match op {
                    BinaryOp::Add => lift2!(a, b, |x, y| x.wrapping_add(y)),
                    BinaryOp::Sub => lift2!(a, b, |x, y| x.wrapping_sub(y)),
                    BinaryOp::Mul => lift2!(a, b, |x, y| x.wrapping_mul(y)),
                    BinaryOp::Div => lift2!(a, b, |x, y| x.div_total(y)),
                    BinaryOp::Rem => lift2!(a, b, |x, y| x.rem_total(y)),
                    BinaryOp::Shl => lift2!(a, b, |x, y| x.shl_total(y)),
                    BinaryOp::Shr => lift2!(a, b, |x, y| x.shr_total(y)),
                    BinaryOp::BitAnd => lift2!(a, b, |x, y| x & y),
                    BinaryOp::BitOr => lift2!(a, b, |x, y| x | y),
                    BinaryOp::BitXor => lift2!(a, b, |x, y| x ^ y),
                    other => panic!("{} is not an integer operator", other.symbol()),
                }
            }
            ExprKind::Unary(UnaryOp::Not, _) | ExprKind::Call(..) => panic!("not an integer expression"),
        }
    }

    fn cond(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Unary(UnaryOp::Not, inner) => !self.cond(inner),
            ExprKind::Binary(BinaryOp::And, l, r) => self.cond(l) && self.cond(r),
            ExprKind::Binary(BinaryOp::Or, l, r) => self.cond(l) || self.cond(r),
            ExprKind::Binary(op, l, r) => {
                let (a, b) = (self.expr(l), self.expr(r));
                match op {
                    BinaryOp::Lt => test2!(a, b, |x, y| x < y),
                    BinaryOp::Le => test2!(a, b, |x, y| x <= y),
                    BinaryOp::Gt => test2!(a, b, |x, y| x > y),
                    BinaryOp::Ge => test2!(a, b, |x, y| x >= y),
                    BinaryOp::Eq => a == b,
                    BinaryOp::Ne => a != b,
                    other => panic!("{} is not a condition", other.symbol()),
                }
            }
            _ => panic!("not a condition"),
        }
    }
}
