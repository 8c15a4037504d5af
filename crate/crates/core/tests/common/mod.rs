//! Random width-8 program pairs with their own concrete semantics, used as
//! the ground truth the library is checked against.

#![allow(dead_code)]

use std::time::Duration;

use patch_impact::oracle::SolverConfig;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const VAR_NAMES: [&str; 2] = ["x", "y"];

pub fn solver(reuse: bool) -> SolverConfig {
    SolverConfig::new("z3 -in", Duration::from_secs(10), Duration::from_secs(120)).unwrap().with_reuse(reuse)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sort8 {
    pub signed: bool,
}

impl Sort8 {
    pub fn name(self) -> &'static str {
        if self.signed {
            "i8"
        } else {
            "u8"
        }
    }

    pub fn wrap(self, v: i64) -> i64 {
        if self.signed {
            v as i8 as i64
        } else {
            v as u8 as i64
        }
    }

    pub fn values(self) -> std::ops::RangeInclusive<i64> {
        if self.signed {
            -128..=127
        } else {
            0..=255
        }
    }

    /// Two's-complement bit pattern of `v`.
    pub fn bits(self, v: i64) -> u64 {
        v as u8 as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Xor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    Const(i64),
    Neg(Box<Expr>),
    BitNot(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    /// Shift by a constant amount below the width.
    Shl(Box<Expr>, u32),
    Shr(Box<Expr>, u32),
    /// Division and remainder by a non-zero constant.
    Div(Box<Expr>, i64),
    Rem(Box<Expr>, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Cmp(Cmp, Expr, Expr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prog {
    pub sort: Sort8,
    pub arity: usize,
    /// `if (cond) { return expr; }` in order, then the final return.
    pub guards: Vec<(Cond, Expr)>,
    pub ret: Expr,
}

fn lit(v: i64) -> String {
    if v < 0 {
        format!("(-{})", -v)
    } else {
        v.to_string()
    }
}

impl Expr {
    pub fn eval(&self, s: Sort8, input: &[i64]) -> i64 {
        match self {
            Expr::Var(i) => input[*i],
            Expr::Const(c) => *c,
            Expr::Neg(e) => s.wrap(-e.eval(s, input)),
            Expr::BitNot(e) => s.wrap(!e.eval(s, input)),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(s, input), b.eval(s, input));
                s.wrap(match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::And => a & b,
                    Op::Or => a | b,
                    Op::Xor => a ^ b,
                })
            }
            Expr::Shl(e, k) => s.wrap(e.eval(s, input) << k),
            // Signed values are held sign-extended, so `>>` is arithmetic
            // for i8 and logical for u8.
            Expr::Shr(e, k) => s.wrap(e.eval(s, input) >> k),
            Expr::Div(e, c) => s.wrap(e.eval(s, input) / c),
            Expr::Rem(e, c) => s.wrap(e.eval(s, input) % c),
        }
    }

    pub fn render(&self, s: Sort8) -> String {
        match self {
            Expr::Var(i) => VAR_NAMES[*i].to_string(),
            Expr::Const(c) => lit(*c),
            // `-c` would be read as a negative literal, which u8 rejects.
            Expr::Neg(e) if !s.signed && matches!(**e, Expr::Const(_)) => format!("(0 - {})", e.render(s)),
            Expr::Neg(e) => format!("(-{})", e.render(s)),
            Expr::BitNot(e) => format!("(~{})", e.render(s)),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    Op::Add => "+",
                    Op::Sub => "-",
                    Op::Mul => "*",
                    Op::And => "&",
                    Op::Or => "|",
                    Op::Xor => "^",
                };
                format!("({} {sym} {})", a.render(s), b.render(s))
            }
            Expr::Shl(e, k) => format!("({} << {k})", e.render(s)),
            Expr::Shr(e, k) => format!("({} >> {k})", e.render(s)),
            Expr::Div(e, c) => format!("({} / {})", e.render(s), lit(*c)),
            Expr::Rem(e, c) => format!("({} % {})", e.render(s), lit(*c)),
        }
    }

    fn has_var(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Const(_) => false,
            Expr::Neg(e) | Expr::BitNot(e) | Expr::Shl(e, _) | Expr::Shr(e, _) | Expr::Div(e, _) | Expr::Rem(e, _) => {
                e.has_var()
            }
            Expr::Bin(_, a, b) => a.has_var() || b.has_var(),
        }
    }
}

impl Cond {
    pub fn eval(&self, s: Sort8, input: &[i64]) -> bool {
        match self {
            Cond::Cmp(op, a, b) => {
                let (a, b) = (a.eval(s, input), b.eval(s, input));
                match op {
                    Cmp::Lt => a < b,
                    Cmp::Le => a <= b,
                    Cmp::Gt => a > b,
                    Cmp::Ge => a >= b,
                    Cmp::Eq => a == b,
                    Cmp::Ne => a != b,
                }
            }
            Cond::Not(c) => !c.eval(s, input),
            Cond::And(a, b) => a.eval(s, input) && b.eval(s, input),
            Cond::Or(a, b) => a.eval(s, input) || b.eval(s, input),
        }
    }

    pub fn render(&self, s: Sort8) -> String {
        match self {
            Cond::Cmp(op, a, b) => {
                let sym = match op {
                    Cmp::Lt => "<",
                    Cmp::Le => "<=",
                    Cmp::Gt => ">",
                    Cmp::Ge => ">=",
                    Cmp::Eq => "==",
                    Cmp::Ne => "!=",
                };
                format!("({} {sym} {})", a.render(s), b.render(s))
            }
            Cond::Not(c) => format!("(!{})", c.render(s)),
            Cond::And(a, b) => format!("({} && {})", a.render(s), b.render(s)),
            Cond::Or(a, b) => format!("({} || {})", a.render(s), b.render(s)),
        }
    }
}

impl Prog {
    pub fn eval(&self, input: &[i64]) -> i64 {
        for (c, e) in &self.guards {
            if c.eval(self.sort, input) {
                return e.eval(self.sort, input);
            }
        }
        self.ret.eval(self.sort, input)
    }

    pub fn render(&self, name: &str) -> String {
        let s = self.sort;
        let params: Vec<String> = VAR_NAMES[..self.arity].iter().map(|v| format!("{v}: {}", s.name())).collect();
        let mut out = format!("fn {name}({}) -> {} {{\n", params.join(", "), s.name());
        for (c, e) in &self.guards {
            out.push_str(&format!("    if {} {{\n        return {};\n    }}\n", c.render(s), e.render(s)));
        }
        out.push_str(&format!("    return {};\n}}\n", self.ret.render(s)));
        out
    }

    /// Every input of the domain, last variable fastest.
    pub fn inputs(&self) -> Vec<Vec<i64>> {
        let mut all = vec![vec![]];
        for _ in 0..self.arity {
            all =
                all.into_iter().flat_map(|p| self.sort.values().map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        all
    }
}

pub struct Gen {
    rng: StdRng,
    sort: Sort8,
    arity: usize,
}

impl Gen {
    fn constant(&mut self) -> i64 {
        if self.sort.signed {
            self.rng.gen_range(-127..=127)
        } else {
            self.rng.gen_range(0..=255)
        }
    }

    fn small_constant(&mut self) -> i64 {
        let c = self.rng.gen_range(1..=9);
        if self.sort.signed && self.rng.gen_bool(0.3) {
            -c
        } else {
            c
        }
    }

    fn leaf(&mut self) -> Expr {
        if self.rng.gen_bool(0.6) {
            Expr::Var(self.rng.gen_range(0..self.arity))
        } else {
            Expr::Const(self.constant())
        }
    }

    fn expr(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.leaf();
        }
        let sub = |g: &mut Gen| Box::new(g.expr(depth - 1));
        match self.rng.gen_range(0..10) {
            0 => Expr::Neg(sub(self)),
            1 => Expr::BitNot(sub(self)),
            2 => Expr::Shl(sub(self), self.rng.gen_range(0..8)),
            3 => Expr::Shr(sub(self), self.rng.gen_range(0..8)),
            4 => {
                let c = self.small_constant();
                if self.rng.gen_bool(0.5) {
                    Expr::Div(sub(self), c)
                } else {
                    Expr::Rem(sub(self), c)
                }
            }
            _ => {
                let op = [Op::Add, Op::Sub, Op::Mul, Op::And, Op::Or, Op::Xor][self.rng.gen_range(0..6)];
                Expr::Bin(op, sub(self), sub(self))
            }
        }
    }

    /// An expression that mentions some input, so it takes the input sort.
    fn var_expr(&mut self, depth: u32) -> Expr {
        loop {
            let e = self.expr(depth);
            if e.has_var() {
                return e;
            }
        }
    }

    fn cond(&mut self, depth: u32) -> Cond {
        if depth == 0 || self.rng.gen_bool(0.6) {
            let op = [Cmp::Lt, Cmp::Le, Cmp::Gt, Cmp::Ge, Cmp::Eq, Cmp::Ne][self.rng.gen_range(0..6)];
            let rhs = if self.rng.gen_bool(0.7) { Expr::Const(self.constant()) } else { self.expr(1) };
            return Cond::Cmp(op, self.var_expr(2), rhs);
        }
        match self.rng.gen_range(0..3) {
            0 => Cond::Not(Box::new(self.cond(depth - 1))),
            1 => Cond::And(Box::new(self.cond(depth - 1)), Box::new(self.cond(depth - 1))),
            _ => Cond::Or(Box::new(self.cond(depth - 1)), Box::new(self.cond(depth - 1))),
        }
    }

    fn prog(&mut self) -> Prog {
        let guards = (0..self.rng.gen_range(0..=2)).map(|_| (self.cond(1), self.expr(2))).collect();
        Prog { sort: self.sort, arity: self.arity, guards, ret: self.expr(2) }
    }

    /// The original and a patched variant of it.
    fn pair(&mut self) -> (Prog, Prog) {
        let orig = self.prog();
        let mut patched = orig.clone();
        match self.rng.gen_range(0..10) {
            // unchanged
            0 => {}
            // unrelated rewrite
            1 => patched = self.prog(),
            // new return value
            2 => patched.ret = self.expr(2),
            // constant result everywhere
            3 => {
                patched.guards.clear();
                patched.ret = Expr::Const(self.constant());
            }
            // early exit guard, the usual shape of a fix
            _ => {
                let at = self.rng.gen_range(0..=patched.guards.len());
                let guard = (self.cond(1), Expr::Const(self.constant()));
                patched.guards.insert(at, guard);
            }
        }
        (orig, patched)
    }
}

/// A reproducible pair for `seed`. One pair in four has two inputs.
pub fn random_pair(seed: u64) -> (Prog, Prog) {
    let mut rng = StdRng::seed_from_u64(seed);
    let sort = Sort8 { signed: rng.gen_bool(0.5) };
    let arity = if rng.gen_bool(0.25) { 2 } else { 1 };
    let mut g = Gen { rng, sort, arity };
    g.pair()
}

/// Exact number of inputs on which both programs return the same value.
pub fn exact_eq_count(a: &Prog, b: &Prog) -> u64 {
    a.inputs().iter().filter(|i| a.eval(i) == b.eval(i)).count() as u64
}
