//! Charts, the nonlinear connection and vector fields in the adapted frame.
//!
//! A vector field is stored by its adapted components
//! `X = X^i δ_i + X̄^a ∂_a` where `δ_i = ∂/∂x^i − N_i^a ∂/∂y^a`. Brackets
//! and derivations are computed through the natural components
//! `X̃^i = X^i`, `X̃^a = X̄^a − X^i N_i^a`, where the coordinate formulas
//! are exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::expr::{directional_all, EvalError, Expr, Tape, Var};

/// Bundle dimensions: base dimension `n = 2k1 + 1`, fibre dimension
/// `m = 2k2 + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chart {
    pub k1: usize,
    pub k2: usize,
}

impl Chart {
    pub fn new(k1: usize, k2: usize) -> Chart {
        Chart { k1, k2 }
    }

    pub fn n(&self) -> usize {
        2 * self.k1 + 1
    }

    pub fn m(&self) -> usize {
        2 * self.k2 + 1
    }

    /// Total dimension `n + m`, always even.
    pub fn dim(&self) -> usize {
        self.n() + self.m()
    }

    /// The chart variable with flat index `k` in `(x^1..x^n, y^1..y^m)`.
    pub fn var(&self, k: usize) -> Var {
        if k < self.n() {
            Var::X(k)
        } else {
            Var::Y(k - self.n())
        }
    }
}

/// A chart point `u = (x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Point {
        Point { x, y }
    }

    pub fn zeros(chart: &Chart) -> Point {
        Point::new(vec![0.0; chart.n()], vec![0.0; chart.m()])
    }

    /// Coordinates in flat order `(x, y)`.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "x=({}), y=({})", join(&self.x), join(&self.y))
    }
}

/// Coefficients `N_i^a(x, y)`, stored row-major as `n[i][a]`.
#[derive(Clone, Debug)]
pub struct NonlinearConnection {
    coeffs: Vec<Vec<Expr>>,
}

impl NonlinearConnection {
    pub fn zero(chart: &Chart) -> NonlinearConnection {
        NonlinearConnection { coeffs: vec![vec![Expr::zero(); chart.m()]; chart.n()] }
    }

    /// Panics if `coeffs` is not `n × m`.
    pub fn new(chart: &Chart, coeffs: Vec<Vec<Expr>>) -> NonlinearConnection {
        assert_eq!(coeffs.len(), chart.n(), "N must have n rows");
        assert!(coeffs.iter().all(|r| r.len() == chart.m()), "N rows must have m entries");
        NonlinearConnection { coeffs }
    }

    pub fn get(&self, i: usize, a: usize) -> &Expr {
        &self.coeffs[i][a]
    }

    /// The `n × m` coefficient matrix.
    pub fn coeffs(&self) -> &[Vec<Expr>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Expr::is_zero)
    }
}

/// A vector field by adapted components: `h[i] = X^i`, `v[a] = X̄^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct VecField {
    pub h: Vec<Expr>,
    pub v: Vec<Expr>,
}

impl VecField {
    pub fn new(h: Vec<Expr>, v: Vec<Expr>) -> VecField {
        VecField { h, v }
    }

    pub fn zero(chart: &Chart) -> VecField {
        VecField::new(vec![Expr::zero(); chart.n()], vec![Expr::zero(); chart.m()])
    }

    /// The adapted frame field with flat index `k`: `δ_k` for `k < n`,
    /// otherwise `∂/∂y^{k-n}`.
    pub fn frame(chart: &Chart, k: usize) -> VecField {
        let mut f = VecField::zero(chart);
        if k < chart.n() {
            f.h[k] = Expr::one();
        } else {
            f.v[k - chart.n()] = Expr::one();
        }
        f
    }

    /// `δ/δx^i`.
    pub fn delta(chart: &Chart, i: usize) -> VecField {
        VecField::frame(chart, i)
    }

    /// `∂/∂y^a`.
    pub fn partial_y(chart: &Chart, a: usize) -> VecField {
        VecField::frame(chart, chart.n() + a)
    }

    /// Horizontal part `X^H`.
    pub fn h_proj(&self) -> VecField {
        VecField::new(self.h.clone(), vec![Expr::zero(); self.v.len()])
    }

    /// Vertical part `X^V`.
    pub fn v_proj(&self) -> VecField {
        VecField::new(vec![Expr::zero(); self.h.len()], self.v.clone())
    }

    /// Structurally horizontal: every vertical component is the zero node.
    pub fn is_horizontal(&self) -> bool {
        self.v.iter().all(Expr::is_zero)
    }

    pub fn is_vertical(&self) -> bool {
        self.h.iter().all(Expr::is_zero)
    }

    /// Components in flat order `(X^1..X^n, X̄^1..X̄^m)`.
    pub fn components(&self) -> impl Iterator<Item = &Expr> {
        self.h.iter().chain(&self.v)
    }

    pub fn from_flat(chart: &Chart, mut comps: Vec<Expr>) -> VecField {
        let v = comps.split_off(chart.n());
        VecField::new(comps, v)
    }

    /// Pointwise product with a function.
    pub fn mul_fn(&self, f: &Expr) -> VecField {
        self.map(|c| f * c)
    }

    pub fn scale(&self, c: f64) -> VecField {
        self.map(|e| e.scale(c))
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> VecField {
        VecField::new(self.h.iter().map(&mut f).collect(), self.v.iter().map(&mut f).collect())
    }

    /// Adapted components at `p`, flat order.
    pub fn eval(&self, p: &Point) -> std::result::Result<Vec<f64>, EvalError> {
        let roots: Vec<Expr> = self.components().cloned().collect();
        Tape::compile(&roots).eval(p)
    }
}

impl Add for &VecField {
    type Output = VecField;
    fn add(self, o: &VecField) -> VecField {
        VecField::new(self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(), self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect())
    }
}

impl Add for VecField {
    type Output = VecField;
    fn add(self, o: VecField) -> VecField {
        &self + &o
    }
}

impl Sub for &VecField {
    type Output = VecField;
    fn sub(self, o: &VecField) -> VecField {
        VecField::new(self.h.iter().zip(&o.h).map(|(a, b)| a - b).collect(), self.v.iter().zip(&o.v).map(|(a, b)| a - b).collect())
    }
}

impl Sub for VecField {
    type Output = VecField;
    fn sub(self, o: VecField) -> VecField {
        &self - &o
    }
}

impl Neg for &VecField {
    type Output = VecField;
    fn neg(self) -> VecField {
        self.map(|e| -e)
    }
}

impl Neg for VecField {
    type Output = VecField;
    fn neg(self) -> VecField {
        -&self
    }
}

/// A chart together with its nonlinear connection.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub chart: Chart,
    pub connection: NonlinearConnection,
}

impl Bundle {
    pub fn new(chart: Chart, connection: NonlinearConnection) -> Bundle {
        Bundle { chart, connection }
    }

    /// The trivial bundle with `N ≡ 0`.
    pub fn flat(chart: Chart) -> Bundle {
        Bundle::new(chart, NonlinearConnection::zero(&chart))
    }

    /// `δf/δx^i = ∂f/∂x^i − N_i^a ∂f/∂y^a` for zero-based `i`.
    pub fn delta_derivative(&self, f: &Expr, i: usize) -> Result<Expr> {
        if i >= self.chart.n() {
            return Err(Error::IndexOutOfRange { what: "horizontal", index: i, bound: self.chart.n() });
        }
        Ok(self.apply(&VecField::delta(&self.chart, i), f))
    }

    /// Natural-frame components `(X̃^i, X̃^a)` of an adapted field.
    pub fn natural(&self, x: &VecField) -> Vec<Expr> {
        let n = self.chart.n();
        let mut out = x.h.clone();
        for a in 0..self.chart.m() {
            let shift = Expr::sum((0..n).map(|i| &x.h[i] * self.connection.get(i, a)));
            out.push(&x.v[a] - shift);
        }
        out
    }

    /// Inverse of [`Bundle::natural`]: `X̄^a = X̃^a + X̃^i N_i^a`.
    pub fn from_natural(&self, nat: Vec<Expr>) -> VecField {
        let n = self.chart.n();
        let v = (0..self.chart.m())
            .map(|a| {
                let shift = Expr::sum((0..n).map(|i| &nat[i] * self.connection.get(i, a)));
                &nat[n + a] + shift
            })
            .collect();
        let mut h = nat;
        h.truncate(n);
        VecField::new(h, v)
    }

    fn seeds(&self, x: &VecField) -> HashMap<Var, Expr> {
        self.natural(x).into_iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(k, e)| (self.chart.var(k), e)).collect()
    }

    /// The derivation `X(f)`.
    pub fn apply(&self, x: &VecField, f: &Expr) -> Expr {
        self.apply_all(x, std::slice::from_ref(f)).pop().expect("one root")
    }

    /// `X(f)` for several functions in one differentiation pass.
    pub fn apply_all(&self, x: &VecField, fs: &[Expr]) -> Vec<Expr> {
        let dir = self.seeds(x);
        if dir.is_empty() {
            return vec![Expr::zero(); fs.len()];
        }
        directional_all(fs, &dir)
    }

    /// Lie bracket `[X, Y]`, computed in the natural frame.
    pub fn bracket(&self, x: &VecField, y: &VecField) -> VecField {
        let xn = self.natural(x);
        let yn = self.natural(y);
        let xy = self.apply_natural(&xn, &yn);
        let yx = self.apply_natural(&yn, &xn);
        let nat = xy.iter().zip(&yx).map(|(a, b)| a - b).collect();
        self.from_natural(nat)
    }

    fn apply_natural(&self, dir: &[Expr], fs: &[Expr]) -> Vec<Expr> {
        let seeds: HashMap<Var, Expr> =
            dir.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(k, e)| (self.chart.var(k), e.clone())).collect();
        if seeds.is_empty() {
            return vec![Expr::zero(); fs.len()];
        }
        directional_all(fs, &seeds)
    }
}
