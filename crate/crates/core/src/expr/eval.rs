use std::collections::HashMap;
use std::fmt;

use super::{postorder, BinaryOp, Expr, Node, UnaryOp, Var};
use crate::bundle::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "log of a non-positive value",
            DomainKind::SqrtOfNegative => "sqrt of a negative value",
        })
    }
}

/// Domain error raised during evaluation, carrying the offending subtree.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind} in `{subtree}` (argument {argument})")]
pub struct EvalError {
    pub kind: DomainKind,
    pub subtree: String,
    pub argument: f64,
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
    Pow(usize, u32),
}

/// A DAG flattened into straight-line code for repeated evaluation.
///
/// `Tape::compile` is linear in the number of distinct nodes; evaluation
/// is one pass over the instruction list.
pub struct Tape {
    ops: Vec<Op>,
    nodes: Vec<Expr>,
    outputs: Vec<usize>,
}

impl Tape {
    pub fn compile(roots: &[Expr]) -> Tape {
        let order = postorder(roots);
        let mut slot: HashMap<usize, usize> = HashMap::with_capacity(order.len());
        let mut ops = Vec::with_capacity(order.len());
        for (k, e) in order.iter().enumerate() {
            let op = match e.node() {
                Node::Const(c) => Op::Const(*c),
                Node::Var(v) => Op::Var(*v),
                Node::Unary(op, a) => Op::Unary(*op, slot[&a.id()]),
                Node::Binary(op, a, b) => Op::Binary(*op, slot[&a.id()], slot[&b.id()]),
                Node::Pow(a, k) => Op::Pow(slot[&a.id()], *k),
            };
            slot.insert(e.id(), k);
            ops.push(op);
        }
        let outputs = roots.iter().map(|r| slot[&r.id()]).collect();
        Tape { ops, nodes: order, outputs }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates every root at `point`, writing them to `out` in order.
    pub fn eval_into(&self, point: &Point, out: &mut Vec<f64>) -> Result<(), EvalError> {
        let mut vals = Vec::with_capacity(self.ops.len());
        for (k, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(c) => c,
                Op::Var(Var::X(i)) => point.x[i],
                Op::Var(Var::Y(a)) => point.y[a],
                Op::Unary(u, a) => {
                    let x: f64 = vals[a];
                    match u {
                        UnaryOp::Neg => -x,
                        UnaryOp::Sin => x.sin(),
                        UnaryOp::Cos => x.cos(),
                        UnaryOp::Sinh => x.sinh(),
                        UnaryOp::Cosh => x.cosh(),
                        UnaryOp::Exp => x.exp(),
                        UnaryOp::Log => {
                            if x <= 0.0 {
                                return Err(self.domain(k, DomainKind::LogOfNonPositive, x));
                            }
                            x.ln()
                        }
                        UnaryOp::Sqrt => {
                            if x < 0.0 {
                                return Err(self.domain(k, DomainKind::SqrtOfNegative, x));
                            }
                            x.sqrt()
                        }
                    }
                }
                Op::Binary(b, l, r) => {
                    let (x, y): (f64, f64) = (vals[l], vals[r]);
                    match b {
                        BinaryOp::Add => x + y,
                        BinaryOp::Sub => x - y,
                        BinaryOp::Mul => x * y,
                        BinaryOp::Div => {
                            if y == 0.0 {
                                return Err(self.domain(k, DomainKind::DivisionByZero, y));
                            }
                            x / y
                        }
                    }
                }
                Op::Pow(a, e) => vals[a].powi(e as i32),
            };
            vals.push(v);
        }
        out.clear();
        out.extend(self.outputs.iter().map(|&k| vals[k]));
        Ok(())
    }

    pub fn eval(&self, point: &Point) -> Result<Vec<f64>, EvalError> {
        let mut out = Vec::with_capacity(self.outputs.len());
        self.eval_into(point, &mut out)?;
        Ok(out)
    }

    /// Evaluates a single-root tape.
    pub fn eval_one(&self, point: &Point) -> Result<f64, EvalError> {
        Ok(self.eval(point)?[0])
    }

    fn domain(&self, k: usize, kind: DomainKind, argument: f64) -> EvalError {
        EvalError { kind, subtree: self.nodes[k].to_string(), argument }
    }
}
