use std::collections::HashMap;

use super::{postorder, BinaryOp, Expr, Node, UnaryOp, Var};

pub(super) fn partial(e: &Expr, v: Var) -> Expr {
    let mut dir = HashMap::new();
    dir.insert(v, Expr::one());
    directional(std::slice::from_ref(e), &dir).pop().expect("one root")
}

/// Forward-mode symbolic differentiation along `dir` (variables absent from
/// the map have zero seed). Shared subexpressions are differentiated once.
pub(super) fn directional(roots: &[Expr], dir: &HashMap<Var, Expr>) -> Vec<Expr> {
    let order = postorder(roots);
    let mut d: HashMap<usize, Expr> = HashMap::with_capacity(order.len());
    for node in &order {
        let out = match node.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(v) => dir.get(v).cloned().unwrap_or_else(Expr::zero),
            Node::Unary(op, a) => {
                let da = d[&a.id()].clone();
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let outer = match op {
                        UnaryOp::Neg => Expr::constant(-1.0),
                        UnaryOp::Sin => a.cos(),
                        UnaryOp::Cos => -a.sin(),
                        UnaryOp::Sinh => a.cosh(),
                        UnaryOp::Cosh => a.sinh(),
                        // d exp(a) = exp(a) da, reusing this very node
                        UnaryOp::Exp => node.clone(),
                        UnaryOp::Log => Expr::one() / a,
                        UnaryOp::Sqrt => Expr::constant(0.5) / node,
                    };
                    outer * da
                }
            }
            Node::Binary(op, a, b) => {
                let da = d[&a.id()].clone();
                let db = d[&b.id()].clone();
                match op {
                    BinaryOp::Add => da + db,
                    BinaryOp::Sub => da - db,
                    BinaryOp::Mul => da * b + a * db,
                    BinaryOp::Div => {
                        if db.is_zero() {
                            da / b
                        } else {
                            da / b - a * db / b.powi(2)
                        }
                    }
                }
            }
            Node::Pow(a, k) => {
                let da = d[&a.id()].clone();
                if da.is_zero() {
                    Expr::zero()
                } else {
                    Expr::constant(*k as f64) * a.powi(k - 1) * da
                }
            }
        };
        d.insert(node.id(), out);
    }
    roots.iter().map(|r| d[&r.id()].clone()).collect()
}
