//! Scalar expressions in the chart variables.
//!
//! Every component function of the geometry (nonlinear connection
//! coefficients, metric blocks, the structure tensors, connection
//! coefficients and curvature components) is an [`Expr`]. Expressions are
//! immutable DAGs: subtrees are shared through [`Arc`], and the traversals in
//! this module (differentiation, simplification, compilation to a [`Tape`])
//! visit each shared node once.
//!
//! The smart constructors (`+`, `-`, `*`, `/`, [`Expr::powi`], the
//! transcendental functions) fold constants and elide neutral elements as
//! they build. [`parse`] produces the raw tree exactly as written, and
//! [`Expr::simplify`] folds it afterwards.

mod diff;
mod eval;
mod parse;
mod print;
mod simplify;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

pub use eval::{DomainKind, EvalError, Tape};
pub use parse::{parse, ParseError};

/// A chart variable: a base coordinate `x^i` or a fibre coordinate `y^a`.
///
/// Indices are zero-based; `Var::X(0)` prints as `x1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl Var {
    /// Position in the flat coordinate vector `(x^1..x^n, y^1..y^m)`.
    pub fn flat_index(self, n: usize) -> usize {
        match self {
            Var::X(i) => i,
            Var::Y(a) => n + a,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Y(a) => write!(f, "y{}", a + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<UnaryOp> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "sinh" => UnaryOp::Sinh,
            "cosh" => UnaryOp::Cosh,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One node of an expression DAG.
#[derive(Debug)]
pub enum Node {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Expr),
    Binary(BinaryOp, Expr, Expr),
    /// Power with a non-negative integer exponent.
    Pow(Expr, u32),
}

/// Shared, immutable expression.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn constant(c: f64) -> Expr {
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(v: Var) -> Expr {
        Expr(Arc::new(Node::Var(v)))
    }

    pub fn x(i: usize) -> Expr {
        Expr::var(Var::X(i))
    }

    pub fn y(a: usize) -> Expr {
        Expr::var(Var::Y(a))
    }

    /// Builds a node without any folding. Used by the parser so that the
    /// tree reflects the input text.
    pub fn raw_unary(op: UnaryOp, e: Expr) -> Expr {
        Expr(Arc::new(Node::Unary(op, e)))
    }

    pub fn raw_binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr(Arc::new(Node::Binary(op, a, b)))
    }

    pub fn raw_pow(e: Expr, k: u32) -> Expr {
        Expr(Arc::new(Node::Pow(e, k)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True for the constant zero node. Structural: `x1 - x1` is not zero.
    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn powi(&self, k: u32) -> Expr {
        simplify::fold_pow(self.clone(), k)
    }

    pub fn sin(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Cos, self.clone())
    }

    pub fn sinh(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Sinh, self.clone())
    }

    pub fn cosh(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Cosh, self.clone())
    }

    pub fn exp(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Log, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        simplify::fold_unary(UnaryOp::Sqrt, self.clone())
    }

    /// Scales by a real factor.
    pub fn scale(&self, c: f64) -> Expr {
        Expr::constant(c) * self
    }

    /// Sum of an iterator of expressions; zero for an empty iterator.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| acc + t)
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        postorder(std::slice::from_ref(self)).len()
    }

    /// Evaluates at a point. Compiles a throwaway [`Tape`]; use
    /// [`Tape::compile`] directly when evaluating at many points.
    pub fn eval(&self, point: &crate::bundle::Point) -> Result<f64, EvalError> {
        Tape::compile(std::slice::from_ref(self)).eval_one(point)
    }

    /// Exact symbolic partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        diff::partial(self, v)
    }

    /// Symbolic directional derivative `Σ_v dir(v) ∂e/∂v`, computed in a
    /// single forward pass over the DAG.
    pub fn directional(&self, dir: &HashMap<Var, Expr>) -> Expr {
        diff::directional(std::slice::from_ref(self), dir).pop().expect("one root")
    }

    /// Constant folding and elision of neutral elements, bottom-up.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Every variable occurring in the expression.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = postorder(std::slice::from_ref(self))
            .iter()
            .filter_map(|e| match e.node() {
                Node::Var(v) => Some(*v),
                _ => None,
            })
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

/// Directional derivative of several roots in one forward pass; shared
/// subexpressions across the roots are differentiated once.
pub fn directional_all(roots: &[Expr], dir: &HashMap<Var, Expr>) -> Vec<Expr> {
    diff::directional(roots, dir)
}

/// Distinct nodes reachable from `roots`, children before parents.
pub(crate) fn postorder(roots: &[Expr]) -> Vec<Expr> {
    let mut seen: HashMap<usize, ()> = HashMap::new();
    let mut out = Vec::new();
    // (node, children already pushed)
    let mut stack: Vec<(Expr, bool)> = roots.iter().rev().map(|r| (r.clone(), false)).collect();
    while let Some((e, expanded)) = stack.pop() {
        if seen.contains_key(&e.id()) {
            continue;
        }
        if expanded {
            seen.insert(e.id(), ());
            out.push(e);
            continue;
        }
        stack.push((e.clone(), true));
        match e.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Unary(_, a) | Node::Pow(a, _) => {
                if !seen.contains_key(&a.id()) {
                    stack.push((a.clone(), false));
                }
            }
            Node::Binary(_, a, b) => {
                if !seen.contains_key(&b.id()) {
                    stack.push((b.clone(), false));
                }
                if !seen.contains_key(&a.id()) {
                    stack.push((a.clone(), false));
                }
            }
        }
    }
    out
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

/// Structural equality. Constants compare with `==` on `f64`.
impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Unary(o1, a), Node::Unary(o2, b)) => o1 == o2 && a == b,
            (Node::Binary(o1, a1, b1), Node::Binary(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Node::Pow(a, k1), Node::Pow(b, k2)) => k1 == k2 && a == b,
            _ => false,
        }
    }
}

macro_rules! binop_impls {
    ($trait:ident, $method:ident, $fold:expr) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $fold(self, rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $fold(self, rhs.clone())
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $fold(self.clone(), rhs)
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $fold(self.clone(), rhs.clone())
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $fold(self, Expr::constant(rhs))
            }
        }
        impl $trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $fold(self.clone(), Expr::constant(rhs))
            }
        }
    };
}

binop_impls!(Add, add, |a, b| simplify::fold_binary(BinaryOp::Add, a, b));
binop_impls!(Sub, sub, |a, b| simplify::fold_binary(BinaryOp::Sub, a, b));
binop_impls!(Mul, mul, |a, b| simplify::fold_binary(BinaryOp::Mul, a, b));
binop_impls!(Div, div, |a, b| simplify::fold_binary(BinaryOp::Div, a, b));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::fold_unary(UnaryOp::Neg, self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::fold_unary(UnaryOp::Neg, self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn postorder_visits_shared_nodes_once() {
        let a = Expr::x(0) + Expr::y(0);
        let b = &a * &a;
        let c = &b + &a;
        // x1, y1, a, b, c
        assert_eq!(c.node_count(), 5);
    }

    #[test]
    fn variables_are_sorted_and_unique() {
        let e = Expr::y(1) * Expr::x(0) + Expr::x(0).sin();
        assert_eq!(e.variables(), vec![Var::X(0), Var::Y(1)]);
    }
}
