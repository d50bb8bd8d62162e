//! Canonical printer. Output re-parses to a structurally equal tree.

use std::fmt;

use super::{BinaryOp, Expr, Node, UnaryOp};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) if c.is_sign_negative() => NEG,
        Node::Const(_) | Node::Var(_) => ATOM,
        Node::Unary(UnaryOp::Neg, _) => NEG,
        Node::Unary(..) => ATOM,
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => ADD,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => MUL,
        Node::Pow(..) => 4,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        f.write_str("(")?;
        write_expr(f, e)?;
        f.write_str(")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(f, "{}", c),
        Node::Var(v) => write!(f, "{}", v),
        Node::Unary(UnaryOp::Neg, a) => {
            f.write_str("-")?;
            // `-2` would re-parse as a negative literal
            if a.as_const().is_some() {
                f.write_str("(")?;
                write_expr(f, a)?;
                f.write_str(")")
            } else {
                write_at(f, a, NEG)
            }
        }
        Node::Unary(op, a) => {
            write!(f, "{}(", op.name())?;
            write_expr(f, a)?;
            f.write_str(")")
        }
        Node::Binary(op, a, b) => {
            let (sym, lhs, rhs) = match op {
                BinaryOp::Add => (" + ", ADD, MUL),
                BinaryOp::Sub => (" - ", ADD, MUL),
                BinaryOp::Mul => ("*", MUL, NEG),
                BinaryOp::Div => ("/", MUL, NEG),
            };
            write_at(f, a, lhs)?;
            f.write_str(sym)?;
            write_at(f, b, rhs)
        }
        Node::Pow(a, k) => {
            write_at(f, a, ATOM)?;
            write!(f, "^{}", k)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
