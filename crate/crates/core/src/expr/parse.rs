//! Recursive-descent parser for the component-expression grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" integer)?
//! atom   := number | ident | func "(" expr ")" | "(" expr ")"
//! func   := sin | cos | sinh | cosh | exp | log | sqrt
//! ```
//!
//! Exponentiation binds tighter than unary minus, so `-x1^2` is `-(x1^2)`.
//! A minus sign directly in front of a numeric literal (and not followed by
//! `^`) produces a negative constant.

use super::{BinaryOp, Expr, UnaryOp, Var};
use crate::bundle::Chart;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("`{func}` takes {expected} argument(s), found {found} (byte {pos})")]
    Arity { func: String, expected: usize, found: usize, pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax { pos: start, msg: format!("malformed number `{lit}`") })?;
                out.push((Tok::Num(v, lit.to_string()), start));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{c}`") }),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::raw_binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::raw_binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() != Tok::Minus {
            return self.power();
        }
        self.bump();
        if let Tok::Num(v, _) = self.peek().clone() {
            if *self.peek_at(1) != Tok::Caret {
                self.bump();
                return Ok(Expr::constant(-v));
            }
        }
        Ok(Expr::raw_unary(UnaryOp::Neg, self.unary()?))
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Tok::Num(_, lit) if lit.bytes().all(|b| b.is_ascii_digit()) => {
                let k: u32 = lit
                    .parse()
                    .map_err(|_| ParseError::Syntax { pos: self.toks[self.at - 1].1, msg: format!("exponent `{lit}` out of range") })?;
                Ok(Expr::raw_pow(base, k))
            }
            _ => {
                self.at -= 1;
                self.syntax("exponent must be a non-negative integer literal")
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v, _) => Ok(Expr::constant(v)),
            Tok::LParen => {
                let e = self.expr()?;
                if self.bump() != Tok::RParen {
                    self.at -= 1;
                    return self.syntax("expected `)`");
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(op) = UnaryOp::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.syntax(format!("expected `(` after `{name}`"));
                    }
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if self.bump() != Tok::RParen {
                        self.at -= 1;
                        return self.syntax("expected `)`");
                    }
                    if args.len() != 1 {
                        return Err(ParseError::Arity { func: name, expected: 1, found: args.len(), pos });
                    }
                    return Ok(Expr::raw_unary(op, args.pop().expect("one argument")));
                }
                self.variable(&name, pos).map(Expr::var)
            }
            Tok::End => self.syntax("unexpected end of input"),
            t => {
                self.at -= 1;
                self.syntax(format!("unexpected token {t:?}"))
            }
        }
    }

    fn variable(&self, name: &str, pos: usize) -> Result<Var, ParseError> {
        let unknown = || ParseError::UnknownIdentifier { name: name.to_string(), pos };
        let (kind, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(unknown());
        }
        let k: usize = digits.parse().map_err(|_| unknown())?;
        match kind {
            "x" if k <= self.chart.n() => Ok(Var::X(k - 1)),
            "y" if k <= self.chart.m() => Ok(Var::Y(k - 1)),
            _ => Err(unknown()),
        }
    }
}

/// Parses `text` with identifiers `x1..xn`, `y1..ym` of `chart`.
///
/// The returned tree is exactly what was written; call
/// [`Expr::simplify`] to fold it.
pub fn parse(text: &str, chart: &Chart) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, at: 0, chart };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}
