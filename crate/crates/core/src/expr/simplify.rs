use std::collections::HashMap;

use super::{postorder, BinaryOp, Expr, Node, UnaryOp};

/// Folds a binary node. Never removes a division by a constant zero so the
/// domain error survives to evaluation.
pub(super) fn fold_binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    match (op, a.as_const(), b.as_const()) {
        (BinaryOp::Add, Some(x), Some(y)) => Expr::constant(x + y),
        (BinaryOp::Sub, Some(x), Some(y)) => Expr::constant(x - y),
        (BinaryOp::Mul, Some(x), Some(y)) => Expr::constant(x * y),
        (BinaryOp::Div, Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),

        (BinaryOp::Add, Some(0.0), _) => b,
        (BinaryOp::Add, _, Some(0.0)) => a,
        (BinaryOp::Sub, _, Some(0.0)) => a,
        (BinaryOp::Sub, Some(0.0), _) => fold_unary(UnaryOp::Neg, b),
        (BinaryOp::Mul, Some(0.0), _) | (BinaryOp::Mul, _, Some(0.0)) => Expr::zero(),
        (BinaryOp::Mul, Some(1.0), _) => b,
        (BinaryOp::Mul, _, Some(1.0)) => a,
        (BinaryOp::Mul, Some(-1.0), _) => fold_unary(UnaryOp::Neg, b),
        (BinaryOp::Mul, _, Some(-1.0)) => fold_unary(UnaryOp::Neg, a),
        (BinaryOp::Div, _, Some(1.0)) => a,
        (BinaryOp::Div, Some(z), Some(d)) if z == 0.0 && d != 0.0 => Expr::zero(),
        (BinaryOp::Div, Some(0.0), None) => Expr::zero(),
        _ => Expr::raw_binary(op, a, b),
    }
}

pub(super) fn fold_unary(op: UnaryOp, a: Expr) -> Expr {
    if let Some(c) = a.as_const() {
        let folded = match op {
            UnaryOp::Neg => Some(-c),
            UnaryOp::Sin => Some(c.sin()),
            UnaryOp::Cos => Some(c.cos()),
            UnaryOp::Sinh => Some(c.sinh()),
            UnaryOp::Cosh => Some(c.cosh()),
            UnaryOp::Exp => Some(c.exp()),
            UnaryOp::Log if c > 0.0 => Some(c.ln()),
            UnaryOp::Sqrt if c >= 0.0 => Some(c.sqrt()),
            _ => None,
        };
        if let Some(v) = folded {
            return Expr::constant(v);
        }
    }
    if op == UnaryOp::Neg {
        if let Node::Unary(UnaryOp::Neg, inner) = a.node() {
            return inner.clone();
        }
    }
    Expr::raw_unary(op, a)
}

pub(super) fn fold_pow(a: Expr, k: u32) -> Expr {
    match (k, a.as_const()) {
        (0, _) => Expr::one(),
        (1, _) => a,
        (_, Some(c)) => Expr::constant(c.powi(k as i32)),
        _ => Expr::raw_pow(a, k),
    }
}

/// Rebuilds the DAG bottom-up through the folding constructors.
pub(super) fn simplify(e: &Expr) -> Expr {
    let order = postorder(std::slice::from_ref(e));
    let mut done: HashMap<usize, Expr> = HashMap::with_capacity(order.len());
    for node in &order {
        let get = |x: &Expr| done[&x.id()].clone();
        let out = match node.node() {
            Node::Const(_) | Node::Var(_) => node.clone(),
            Node::Unary(op, a) => fold_unary(*op, get(a)),
            Node::Binary(op, a, b) => fold_binary(*op, get(a), get(b)),
            Node::Pow(a, k) => fold_pow(get(a), *k),
        };
        done.insert(node.id(), out);
    }
    done[&e.id()].clone()
}

#[cfg(test)]
mod tests {
    use crate::bundle::{Chart, Point};
    use crate::expr::parse;

    fn chart() -> Chart {
        Chart::new(1, 1)
    }

    #[test]
    fn elides_zero_product_and_sum() {
        let e = parse("0*x1 + y1", &chart()).unwrap();
        assert_eq!(e.simplify().to_string(), "y1");
    }

    #[test]
    fn elides_unit_power() {
        let e = parse("x1^1", &chart()).unwrap();
        assert_eq!(e.simplify().to_string(), "x1");
    }

    #[test]
    fn folds_constants() {
        let e = parse("2*3 + exp(0)*x2", &chart()).unwrap();
        assert_eq!(e.simplify().to_string(), "6 + x2");
    }

    #[test]
    fn keeps_division_by_constant_zero() {
        let e = parse("1/(1-1)", &chart()).unwrap().simplify();
        let p = Point::zeros(&chart());
        assert!(e.eval(&p).is_err());
    }

    #[test]
    fn double_negation_cancels() {
        let e = parse("-(-x1)", &chart()).unwrap().simplify();
        assert_eq!(e.to_string(), "x1");
    }
}
