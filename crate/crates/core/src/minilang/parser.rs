use super::ast::{BinaryOp, Block, Expr, ExprKind, Function, Param, Span, Stmt, StmtKind, UnaryOp};
use super::error::{ParseError, ParseErrorKind};
use super::lexer::{tokenize, Tok};
use super::sort::IntSort;

/// Parses every function in `src`, without scope checks or inlining.
pub fn parse_functions(src: &str) -> Result<Vec<Function>, ParseError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut functions = Vec::new();
    while parser.peek() != &Tok::Eof {
        functions.push(parser.function()?);
    }
    if functions.is_empty() {
        return Err(ParseError::new(parser.span(), ParseErrorKind::Empty));
    }
    Ok(functions)
}

struct Parser {
    tokens: Vec<(Tok, Span)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> (Tok, Span) {
        let item = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        item
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek() == &tok {
            Ok(self.advance().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(
            self.span(),
            ParseErrorKind::Syntax(format!("expected {wanted}, found {}", self.peek().describe())),
        )
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.advance().1;
                Ok((name, span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn sort(&mut self) -> PResult<IntSort> {
        let (name, span) = self.ident()?;
        name.parse().map_err(|_| ParseError::new(span, ParseErrorKind::UnknownType(name)))
    }

    fn function(&mut self) -> PResult<Function> {
        let span = self.expect(Tok::Fn)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params: Vec<Param> = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                let (pname, pspan) = self.ident()?;
                self.expect(Tok::Colon)?;
                let sort = self.sort()?;
                if params.iter().any(|p| p.name == pname) {
                    return Err(ParseError::new(pspan, ParseErrorKind::DuplicateParam(pname)));
                }
                params.push(Param { name: pname, sort });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let ret = self.sort()?;
        let body = self.block()?;
        Ok(Function { name, params, ret, body, span })
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if self.peek() == &Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Let => {
                self.advance();
                let (name, _) = self.ident()?;
                self.expect(Tok::Colon)?;
                let sort = self.sort()?;
                self.expect(Tok::Assign)?;
                let init = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Let { name, sort, init }
            }
            Tok::If => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_block = self.block()?;
                let else_block = if self.eat(&Tok::Else) {
                    if self.peek() == &Tok::If {
                        Some(vec![self.stmt()?])
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                StmtKind::If { cond, then_block, else_block }
            }
            Tok::While => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            Tok::Return => {
                self.advance();
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Return(value)
            }
            Tok::Ident(name) if self.peek_at(1) == &Tok::Assign => {
                self.advance();
                self.advance();
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Assign { name, value }
            }
            _ => return Err(self.unexpected("statement")),
        };
        Ok(Stmt { kind, span })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek() {
            Tok::OrOr => BinaryOp::Or,
            Tok::AndAnd => BinaryOp::And,
            Tok::Pipe => BinaryOp::BitOr,
            Tok::Caret => BinaryOp::BitXor,
            Tok::Amp => BinaryOp::BitAnd,
            Tok::EqEq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::Shl => BinaryOp::Shl,
            Tok::Shr => BinaryOp::Shr,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Percent => BinaryOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let span = self.advance().1;
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Minus => {
                self.advance();
                if let Tok::Int { value, hex } = *self.peek() {
                    self.advance();
                    return Ok(Expr::new(ExprKind::Lit { value: -(value as i128), hex }, span));
                }
                let inner = self.unary()?;
                Ok(Expr::new(ExprKind::Unary(UnaryOp::Neg, Box::new(inner)), span))
            }
            Tok::Tilde => {
                self.advance();
                let inner = self.unary()?;
                Ok(Expr::new(ExprKind::Unary(UnaryOp::BitNot, Box::new(inner)), span))
            }
            Tok::Bang => {
                self.advance();
                let inner = self.unary()?;
                Ok(Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(inner)), span))
            }
            Tok::LParen if self.cast_ahead() => {
                self.advance();
                let sort = self.sort()?;
                self.expect(Tok::RParen)?;
                let inner = self.unary()?;
                Ok(Expr::new(ExprKind::Cast(sort, Box::new(inner)), span))
            }
            _ => self.primary(),
        }
    }

    fn cast_ahead(&self) -> bool {
        matches!(self.peek_at(1), Tok::Ident(name) if name.parse::<IntSort>().is_ok())
            && self.peek_at(2) == &Tok::RParen
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int { value, hex } => {
                self.advance();
                Ok(Expr::new(ExprKind::Lit { value: value as i128, hex }, span))
            }
            Tok::Ident(name) => {
                self.advance();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if self.peek() != &Tok::RParen {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Expr::new(ExprKind::Call(name, args), span))
                } else {
                    Ok(Expr::new(ExprKind::Var(name), span))
                }
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body_expr(src: &str) -> Expr {
        let f = parse_functions(&format!("fn f(x: i32, y: i32) -> i32 {{ return {src}; }}")).unwrap();
        match &f[0].body[0].kind {
            StmtKind::Return(e) => e.clone(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn c_precedence() {
        // x + y * 2 == 3 || x  parses as ((x + (y * 2)) == 3) || x
        let e = body_expr("x + y * 2 == 3 || x");
        let ExprKind::Binary(BinaryOp::Or, lhs, _) = e.kind else { panic!() };
        let ExprKind::Binary(BinaryOp::Eq, sum, _) = lhs.kind else { panic!() };
        let ExprKind::Binary(BinaryOp::Add, _, prod) = sum.kind else { panic!() };
        assert!(matches!(prod.kind, ExprKind::Binary(BinaryOp::Mul, _, _)));
    }

    #[test]
    fn left_associative_subtraction() {
        let e = body_expr("x - y - 1");
        let ExprKind::Binary(BinaryOp::Sub, lhs, rhs) = e.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Binary(BinaryOp::Sub, _, _)));
        assert!(matches!(rhs.kind, ExprKind::Lit { value: 1, .. }));
    }

    #[test]
    fn negative_literals_and_casts() {
        assert!(matches!(body_expr("-22").kind, ExprKind::Lit { value: -22, hex: false }));
        let e = body_expr("(i32)(u8)x");
        let ExprKind::Cast(IntSort::I32, inner) = e.kind else { panic!() };
        assert!(matches!(inner.kind, ExprKind::Cast(IntSort::U8, _)));
        // parenthesised variable is not a cast
        assert!(matches!(body_expr("(x)").kind, ExprKind::Var(_)));
    }

    #[test]
    fn else_if_chains() {
        let f = parse_functions(
            "fn f(x: i8) -> i8 { if (x < 0) { return 0; } else if (x < 5) { return 1; } else { return 2; } }",
        )
        .unwrap();
        let StmtKind::If { else_block: Some(els), .. } = &f[0].body[0].kind else { panic!() };
        assert!(matches!(els[0].kind, StmtKind::If { .. }));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_functions("fn f(x: i32) -> i32 {\n  return x +;\n}").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (2, 13));
        let err = parse_functions("fn f(x: int) -> i32 { return 0; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownType("int".into()));
        let err = parse_functions("fn f(x: i8, x: i8) -> i8 { return x; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateParam("x".into()));
        assert_eq!(parse_functions("  ").unwrap_err().kind, ParseErrorKind::Empty);
    }
}
