//! Recursive-descent parser for constraint expressions.
//!
//! Precedence, tightest first: `^` (right-associative), unary `-`,
//! `*` `/`, `+` `-` (left-associative). Functions are `sqrt`, `log`,
//! `exp`, `inv`. Variables are `Ec` and `Eh`; the named parameters are
//! `alpha`, `d`, `s`, and `eta_c`. Any other identifier is rejected with
//! its position.

use super::token::{Token, TokenKind};
use crate::{Error, Result};

/// Recognized parameter names. `eta_c` is reserved so that
/// temperature-dependent constraints stay expressible; the universality
/// checks treat its presence as order-changing.
pub const PARAM_NAMES: [&str; 4] = ["alpha", "d", "s", "eta_c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Ec,
    Eh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Log,
    Exp,
    Inv,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Inv => "inv",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sqrt" => Some(Func::Sqrt),
            "log" => Some(Func::Log),
            "exp" => Some(Func::Exp),
            "inv" => Some(Func::Inv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable(Var),
    Param(String),
    Unary(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// True when the subtree references neither variable (it evaluates to
    /// a constant once parameters are bound).
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Number(_) | Expr::Param(_) => true,
            Expr::Variable(_) => false,
            Expr::Unary(e) => e.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
            Expr::Call(_, e) => e.is_constant(),
        }
    }

    /// True when the subtree references the given parameter.
    pub fn references_param(&self, name: &str) -> bool {
        match self {
            Expr::Param(p) => p == name,
            Expr::Number(_) | Expr::Variable(_) => false,
            Expr::Unary(e) => e.references_param(name),
            Expr::Binary(_, a, b) => a.references_param(name) || b.references_param(name),
            Expr::Call(_, e) => e.references_param(name),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Unary(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

/// Precedence-aware printer; `parse(print(e))` reproduces `e` structurally.
impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn wrap(f: &mut std::fmt::Formatter<'_>, e: &Expr, parens: bool) -> std::fmt::Result {
            if parens {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Number(v) => {
                if *v < 0.0 || v.is_sign_negative() {
                    // negative literals only arise from substitution; print
                    // them parenthesized so the reparse keeps the shape
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Variable(Var::Ec) => write!(f, "Ec"),
            Expr::Variable(Var::Eh) => write!(f, "Eh"),
            Expr::Param(p) => write!(f, "{p}"),
            Expr::Unary(e) => {
                write!(f, "-")?;
                wrap(f, e, e.precedence() < 4)
            }
            Expr::Binary(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    // right-associative: parenthesize a left child of equal
                    // precedence, keep a right child bare
                    wrap(f, a, a.precedence() <= prec)?;
                    write!(f, "{sym}")?;
                    return wrap(f, b, b.precedence() < prec);
                }
                wrap(f, a, a.precedence() < prec)?;
                // additive operators print spaced, multiplicative tight
                if prec == 1 {
                    write!(f, " {sym} ")?;
                } else {
                    write!(f, "{sym}")?;
                }
                // for - and /, a right child at the same precedence needs
                // parens to survive left-associative reparsing
                let needs = match op {
                    BinOp::Sub | BinOp::Div => b.precedence() <= prec,
                    _ => b.precedence() < prec,
                };
                wrap(f, b, needs)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// Unary minus, with literal folding so `-2` and a substituted `-2.0`
/// share one structural form.
fn negate(e: Expr) -> Expr {
    match e {
        Expr::Number(v) => Expr::Number(-v),
        other => Expr::Unary(Box::new(other)),
    }
}

pub struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    source_len: usize,
}

impl<'a> Parser<'a> {
    pub fn new(tokens: &'a [Token], source_len: usize) -> Self {
        Parser {
            tokens,
            pos: 0,
            source_len,
        }
    }

    pub fn parse(mut self) -> Result<Expr> {
        let e = self.expr()?;
        if let Some(tok) = self.peek() {
            return Err(self.error_at(tok.pos, "unexpected trailing input"));
        }
        Ok(e)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> usize {
        self.source_len + 1
    }

    fn error_at(&self, position: usize, message: &str) -> Error {
        Error::Parse {
            position,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.advance();
            let inner = self.unary()?;
            return Ok(negate(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.advance();
            // right-associative; the exponent may carry a unary minus
            let exponent = self.unary_in_exponent()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn unary_in_exponent(&mut self) -> Result<Expr> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.advance();
            let inner = self.unary_in_exponent()?;
            return Ok(negate(inner));
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.advance() else {
            return Err(self.error_at(self.end_pos(), "unexpected end of expression"));
        };
        let pos = tok.pos;
        match tok.kind.clone() {
            TokenKind::Number(v) => Ok(Expr::Number(v)),
            TokenKind::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    match self.peek().map(|t| &t.kind) {
                        Some(TokenKind::LParen) => {
                            self.advance();
                            let arg = self.expr()?;
                            match self.advance().map(|t| t.kind.clone()) {
                                Some(TokenKind::RParen) => Ok(Expr::Call(func, Box::new(arg))),
                                Some(_) => {
                                    Err(self
                                        .error_at(self.tokens[self.pos - 1].pos, "expected ')'"))
                                }
                                None => Err(self.error_at(self.end_pos(), "expected ')'")),
                            }
                        }
                        _ => Err(self.error_at(pos, &format!("function '{name}' needs '('"))),
                    }
                } else if name == "Ec" {
                    Ok(Expr::Variable(Var::Ec))
                } else if name == "Eh" {
                    Ok(Expr::Variable(Var::Eh))
                } else if PARAM_NAMES.contains(&name.as_str()) {
                    Ok(Expr::Param(name))
                } else {
                    Err(self.error_at(
                        pos,
                        &format!(
                            "unknown identifier '{name}' (variables: Ec, Eh; parameters: {})",
                            PARAM_NAMES.join(", ")
                        ),
                    ))
                }
            }
            TokenKind::LParen => {
                let e = self.expr()?;
                match self.advance().map(|t| t.kind.clone()) {
                    Some(TokenKind::RParen) => Ok(e),
                    Some(_) => Err(self.error_at(self.tokens[self.pos - 1].pos, "expected ')'")),
                    None => Err(self.error_at(self.end_pos(), "expected ')'")),
                }
            }
            other => Err(self.error_at(pos, &format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::token::tokenize;
    use super::*;

    fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        Parser::new(&tokens, text.chars().count()).parse()
    }

    #[test]
    fn linear_combination_with_free_param() {
        let e = parse("alpha*Ec + (1-alpha)*Eh").unwrap();
        assert!(e.references_param("alpha"));
        assert!(!e.references_param("d"));
    }

    #[test]
    fn d_linear_form_parses() {
        assert!(parse("Ec - (1-d)*Eh").is_ok());
    }

    #[test]
    fn unary_plus_is_rejected_with_position() {
        match parse("2*+Eh") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected positioned parse error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_caret_fails_at_end() {
        match parse("Ec^") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        match parse("Ech*Eh") {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 1);
                assert!(message.contains("Ech"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_shapes() {
        // Ec + Eh*2 groups the product first
        let e = parse("Ec + Eh*2").unwrap();
        match e {
            Expr::Binary(BinOp::Add, _, rhs) => {
                assert!(matches!(*rhs, Expr::Binary(BinOp::Mul, ..)));
            }
            other => panic!("bad shape {other:?}"),
        }
        // -Eh^2 is -(Eh^2)
        let e = parse("-Eh^2").unwrap();
        match e {
            Expr::Unary(inner) => assert!(matches!(*inner, Expr::Binary(BinOp::Pow, ..))),
            other => panic!("bad shape {other:?}"),
        }
        // a - b - c is (a - b) - c
        let e = parse("Ec - Eh - 1").unwrap();
        match e {
            Expr::Binary(BinOp::Sub, lhs, _) => {
                assert!(matches!(*lhs, Expr::Binary(BinOp::Sub, ..)));
            }
            other => panic!("bad shape {other:?}"),
        }
        // 2^3^2 is 2^(3^2)
        let e = parse("2^3^2").unwrap();
        match e {
            Expr::Binary(BinOp::Pow, _, rhs) => {
                assert!(matches!(*rhs, Expr::Binary(BinOp::Pow, ..)));
            }
            other => panic!("bad shape {other:?}"),
        }
    }

    #[test]
    fn exponent_accepts_unary_minus() {
        assert!(parse("Eh^-1").is_ok());
        assert!(parse("Eh^-inv(Ec)").is_ok());
    }

    #[test]
    fn function_call_requires_parens() {
        assert!(parse("sqrt(Ec*Eh)").is_ok());
        assert!(parse("sqrt Ec").is_err());
        assert!(parse("log(Ec").is_err());
    }

    #[test]
    fn display_round_trips_structurally() {
        for text in [
            "Ec*Eh",
            "1/Ec + 1/Eh",
            "alpha*Ec + (1-alpha)*Eh",
            "Ec - (1-d)*Eh",
            "(s/eta_c)*Ec + (1-s/eta_c)*Eh",
            "-Eh^2",
            "2^-3",
            "Ec - (Eh - 1)",
            "Ec / (Eh / 2)",
            "sqrt(Ec)*log(Eh) - exp(inv(Ec))",
            "2^3^2",
            "(Ec^2)^3",
        ] {
            let e = parse(text).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed)
                .unwrap_or_else(|err| panic!("reparse of '{printed}' failed: {err}"));
            assert_eq!(e, reparsed, "round trip of '{text}' via '{printed}'");
        }
    }
}
