//! Residual bookkeeping: every check evaluates a batch of expressions that
//! should vanish and reports the largest absolute value with the point and
//! arguments where it occurred.

use crate::bundle::{Point, VecField};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::sample::TestField;

/// Default residual threshold.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Where a residual attains its maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Point,
    pub fields: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    /// Max-abs value; NaN results count as `+inf`.
    pub value: f64,
    pub witness: Option<Witness>,
}

impl Residual {
    pub fn zero(name: impl Into<String>) -> Residual {
        Residual { name: name.into(), value: 0.0, witness: None }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.value < tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    HypothesisNotMet,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisNotMet => "hypothesis-not-met",
        }
    }
}

/// A named group of residual clauses.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub clauses: Vec<Residual>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, clauses: Vec<Residual>) -> CheckReport {
        CheckReport { name: name.into(), clauses }
    }

    /// The worst clause, or a zero residual for an empty report.
    pub fn worst(&self) -> Residual {
        self.clauses
            .iter()
            .cloned()
            .reduce(|a, b| if b.value > a.value { b } else { a })
            .unwrap_or_else(|| Residual::zero(self.name.clone()))
    }

    pub fn max(&self) -> f64 {
        self.worst().value
    }

    pub fn clause(&self, name: &str) -> Option<&Residual> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

/// Sample points, test fields and the residual threshold.
#[derive(Clone, Debug)]
pub struct Context {
    pub points: Vec<Point>,
    pub fields: Vec<TestField>,
    pub tolerance: f64,
}

impl Context {
    pub fn new(points: Vec<Point>, fields: Vec<TestField>, tolerance: f64) -> Context {
        Context { points, fields, tolerance }
    }

    /// Ordered argument pairs for bilinear checks: every pair of frame
    /// fields (the first `frame` entries), and every other field paired
    /// with each frame field and with itself.
    pub fn pairs(&self, frame: usize) -> Vec<(usize, usize)> {
        let k = self.fields.len();
        let mut out = Vec::new();
        for i in 0..frame.min(k) {
            for j in 0..frame.min(k) {
                out.push((i, j));
            }
        }
        for i in frame..k {
            for j in 0..frame.min(k) {
                out.push((i, j));
                out.push((j, i));
            }
            out.push((i, i));
            if i + 1 < k {
                out.push((i, i + 1));
            }
        }
        out
    }
}

/// Collects expressions that should vanish, each tagged with the argument
/// labels that produced it.
pub struct Probe {
    name: String,
    exprs: Vec<Expr>,
    labels: Vec<Vec<String>>,
}

impl Probe {
    pub fn new(name: impl Into<String>) -> Probe {
        Probe { name: name.into(), exprs: Vec::new(), labels: Vec::new() }
    }

    pub fn push(&mut self, e: Expr, labels: &[&str]) {
        if e.is_zero() {
            return;
        }
        self.exprs.push(e);
        self.labels.push(labels.iter().map(|s| s.to_string()).collect());
    }

    pub fn push_field(&mut self, f: &VecField, labels: &[&str]) {
        for c in f.components() {
            self.push(c.clone(), labels);
        }
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    /// Max-abs over all collected expressions and `points`.
    pub fn run(self, points: &[Point]) -> Result<Residual> {
        let mut best = Residual::zero(self.name);
        if self.exprs.is_empty() {
            return Ok(best);
        }
        let tape = Tape::compile(&self.exprs);
        let mut out = Vec::with_capacity(self.exprs.len());
        for p in points {
            tape.eval_into(p, &mut out).map_err(|e| Error::domain(e, p))?;
            for (k, v) in out.iter().enumerate() {
                let a = if v.is_nan() { f64::INFINITY } else { v.abs() };
                if a > best.value || (best.witness.is_none() && a >= best.value) {
                    best.value = a;
                    best.witness = Some(Witness { point: p.clone(), fields: self.labels[k].clone() });
                }
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_reports_max_with_witness() {
        let mut pr = Probe::new("t");
        pr.push(Expr::x(0), &["a"]);
        pr.push(Expr::y(0).scale(2.0), &["b"]);
        pr.push(Expr::zero(), &["c"]);
        assert_eq!(pr.len(), 2);
        let pts = vec![Point::new(vec![1.0, 0.0, 0.0], vec![0.1, 0.0, 0.0]), Point::new(vec![-3.0, 0.0, 0.0], vec![1.0, 0.0, 0.0])];
        let r = pr.run(&pts).unwrap();
        assert_eq!(r.value, 3.0);
        let w = r.witness.unwrap();
        assert_eq!(w.fields, vec!["a".to_string()]);
        assert_eq!(w.point, pts[1]);
    }

    #[test]
    fn nan_counts_as_infinite() {
        let mut pr = Probe::new("t");
        pr.push(Expr::x(0).ln() * Expr::zero().sin() + Expr::x(0).sqrt(), &["a"]);
        let pts = vec![Point::new(vec![1.0, 0.0, 0.0], vec![0.0; 3])];
        assert_eq!(pr.run(&pts).unwrap().value, 1.0);
    }

    #[test]
    fn domain_errors_carry_the_point() {
        let mut pr = Probe::new("t");
        pr.push(Expr::one() / Expr::x(0), &[]);
        let p = Point::new(vec![0.0; 3], vec![0.0; 3]);
        match pr.run(std::slice::from_ref(&p)) {
            Err(Error::Domain { point, .. }) => assert_eq!(point, p),
            other => panic!("{other:?}"),
        }
    }
}
