//! Distinguished tensors: 1-forms, covariant 2-tensors split into blocks,
//! the block pseudo-metric `G = g ⊕ h`, and exterior derivatives.
//!
//! Exterior derivatives carry no `1/2` factor:
//! `dω(X, Y) = X(ω(Y)) − Y(ω(X)) − ω([X, Y])`, and the 2-form case is the
//! matching six-term formula.

use nalgebra::DMatrix;

use crate::bundle::{Bundle, Chart, Point, VecField};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};

/// Anything that eats one vector field and returns a function.
pub trait Covector {
    fn apply(&self, x: &VecField) -> Expr;
}

impl<F: Fn(&VecField) -> Expr> Covector for F {
    fn apply(&self, x: &VecField) -> Expr {
        self(x)
    }
}

/// Anything that eats two vector fields and returns a function.
pub trait BilinearForm {
    fn apply(&self, x: &VecField, y: &VecField) -> Expr;
}

impl<F: Fn(&VecField, &VecField) -> Expr> BilinearForm for F {
    fn apply(&self, x: &VecField, y: &VecField) -> Expr {
        self(x, y)
    }
}

/// `ω = ω_i dx^i + ω̄_a δy^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub h: Vec<Expr>,
    pub v: Vec<Expr>,
}

impl OneForm {
    pub fn new(h: Vec<Expr>, v: Vec<Expr>) -> OneForm {
        OneForm { h, v }
    }

    /// `df = δ_i f dx^i + ∂_a f δy^a`.
    pub fn exact(b: &Bundle, f: &Expr) -> OneForm {
        let c = &b.chart;
        let comps: Vec<Expr> = (0..c.dim()).map(|k| b.apply(&VecField::frame(c, k), f)).collect();
        let vf = VecField::from_flat(c, comps);
        OneForm::new(vf.h, vf.v)
    }

    /// `ω^H`, which annihilates vertical fields.
    pub fn h_part(&self) -> OneForm {
        OneForm::new(self.h.clone(), vec![Expr::zero(); self.v.len()])
    }

    /// `ω^V`, which annihilates horizontal fields.
    pub fn v_part(&self) -> OneForm {
        OneForm::new(vec![Expr::zero(); self.h.len()], self.v.clone())
    }
}

impl Covector for OneForm {
    fn apply(&self, x: &VecField) -> Expr {
        contract(&self.h, &x.h) + contract(&self.v, &x.v)
    }
}

pub(crate) fn contract(a: &[Expr], b: &[Expr]) -> Expr {
    Expr::sum(a.iter().zip(b).map(|(p, q)| p * q))
}

fn quadratic(m: &[Vec<Expr>], x: &[Expr], y: &[Expr]) -> Expr {
    Expr::sum(m.iter().enumerate().flat_map(|(i, row)| {
        row.iter().enumerate().map(move |(j, c)| if x[i].is_zero() || y[j].is_zero() { Expr::zero() } else { c * &x[i] * &y[j] })
    }))
}

/// A covariant 2-tensor by adapted blocks: `hh[i][j]` on `dx^i ⊗ dx^j`,
/// `hv[i][b]` on `dx^i ⊗ δy^b`, `vh[a][j]`, `vv[a][b]`. Each block is a
/// d-tensor in its own right.
#[derive(Clone, Debug)]
pub struct TwoTensor {
    pub hh: Vec<Vec<Expr>>,
    pub hv: Vec<Vec<Expr>>,
    pub vh: Vec<Vec<Expr>>,
    pub vv: Vec<Vec<Expr>>,
}

impl TwoTensor {
    pub fn zero(c: &Chart) -> TwoTensor {
        let (n, m) = (c.n(), c.m());
        TwoTensor {
            hh: vec![vec![Expr::zero(); n]; n],
            hv: vec![vec![Expr::zero(); m]; n],
            vh: vec![vec![Expr::zero(); n]; m],
            vv: vec![vec![Expr::zero(); m]; m],
        }
    }

    /// Components of any bilinear form on the adapted frame.
    pub fn from_form(c: &Chart, form: &dyn BilinearForm) -> TwoTensor {
        let (n, m) = (c.n(), c.m());
        let e = |k| VecField::frame(c, k);
        let block = |r0: usize, rl: usize, c0: usize, cl: usize| {
            (0..rl).map(|i| (0..cl).map(|j| form.apply(&e(r0 + i), &e(c0 + j))).collect()).collect()
        };
        TwoTensor { hh: block(0, n, 0, n), hv: block(0, n, n, m), vh: block(n, m, 0, n), vv: block(n, m, n, m) }
    }
}

impl BilinearForm for TwoTensor {
    fn apply(&self, x: &VecField, y: &VecField) -> Expr {
        quadratic(&self.hh, &x.h, &y.h)
            + quadratic(&self.hv, &x.h, &y.v)
            + quadratic(&self.vh, &x.v, &y.h)
            + quadratic(&self.vv, &x.v, &y.v)
    }
}

/// Block pseudo-metric `G = g_ij dx^i ⊗ dx^j + h_ab δy^a ⊗ δy^b`.
#[derive(Clone, Debug)]
pub struct Metric {
    pub g: Vec<Vec<Expr>>,
    pub h: Vec<Vec<Expr>>,
}

/// Threshold on `|det|` below which a block counts as singular.
pub const SINGULAR_DET: f64 = 1e-10;

impl Metric {
    pub fn new(g: Vec<Vec<Expr>>, h: Vec<Vec<Expr>>) -> Metric {
        Metric { g, h }
    }

    pub fn identity(c: &Chart) -> Metric {
        let id = |k: usize| (0..k).map(|i| (0..k).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect();
        Metric::new(id(c.n()), id(c.m()))
    }

    /// `G(X^H, Y^H)`.
    pub fn apply_h(&self, x: &VecField, y: &VecField) -> Expr {
        quadratic(&self.g, &x.h, &y.h)
    }

    /// `G(X^V, Y^V)`.
    pub fn apply_v(&self, x: &VecField, y: &VecField) -> Expr {
        quadratic(&self.h, &x.v, &y.v)
    }

    /// Numeric blocks at `p`.
    pub fn blocks_at(&self, p: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        Ok((eval_matrix(&self.g, p)?, eval_matrix(&self.h, p)?))
    }

    /// Numeric inverses `(g^{kl}, h^{cd})` at `p`.
    pub fn inverse_blocks_at(&self, p: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (g, h) = self.blocks_at(p)?;
        Ok((invert(g, "horizontal", p)?, invert(h, "vertical", p)?))
    }

    /// Symbolic inverses via the adjugate. Entries share one `1/det` node.
    pub fn inverse_symbolic(&self) -> (Vec<Vec<Expr>>, Vec<Vec<Expr>>) {
        (inverse_symbolic(&self.g), inverse_symbolic(&self.h))
    }

    /// Largest asymmetry `|g_ij − g_ji|`, `|h_ab − h_ba|` over `points`,
    /// and a singular-block error if some `|det| ≤ 1e-10`.
    pub fn validate(&self, points: &[Point]) -> Result<f64> {
        let mut asym: f64 = 0.0;
        for p in points {
            let (g, h) = self.blocks_at(p)?;
            for (blk, name) in [(&g, "horizontal"), (&h, "vertical")] {
                asym = asym.max((blk - blk.transpose()).amax());
                let det = blk.determinant();
                if det.abs() <= SINGULAR_DET {
                    return Err(Error::SingularBlock { block: name, det, point: p.clone() });
                }
            }
        }
        Ok(asym)
    }
}

impl BilinearForm for Metric {
    fn apply(&self, x: &VecField, y: &VecField) -> Expr {
        self.apply_h(x, y) + self.apply_v(x, y)
    }
}

pub(crate) fn eval_matrix(m: &[Vec<Expr>], p: &Point) -> Result<DMatrix<f64>> {
    let k = m.len();
    let roots: Vec<Expr> = m.iter().flatten().cloned().collect();
    let vals = Tape::compile(&roots).eval(p).map_err(|e| Error::domain(e, p))?;
    Ok(DMatrix::from_row_slice(k, k, &vals))
}

fn invert(m: DMatrix<f64>, block: &'static str, p: &Point) -> Result<DMatrix<f64>> {
    let det = m.determinant();
    if det.abs() <= SINGULAR_DET {
        return Err(Error::SingularBlock { block, det, point: p.clone() });
    }
    m.try_inverse().ok_or(Error::SingularBlock { block, det, point: p.clone() })
}

/// Laplace expansion along the first row, skipping structural zeros.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let rows: Vec<usize> = (0..m.len()).collect();
    let cols = rows.clone();
    minor_det(m, &rows, &cols)
}

fn minor_det(m: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        0 => Expr::one(),
        1 => m[rows[0]][cols[0]].clone(),
        _ => {
            let r = rows[0];
            let sub_rows = &rows[1..];
            Expr::sum(cols.iter().enumerate().map(|(k, &c)| {
                let a = &m[r][c];
                if a.is_zero() {
                    return Expr::zero();
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = a * minor_det(m, sub_rows, &sub_cols);
                if k % 2 == 0 {
                    term
                } else {
                    -term
                }
            }))
        }
    }
}

/// Symbolic inverse `adj(m)/det(m)`.
pub fn inverse_symbolic(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let k = m.len();
    let inv_det = Expr::one() / determinant(m);
    let all: Vec<usize> = (0..k).collect();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    // (adj m)_{ij} = (−1)^{i+j} M_{ji}
                    let rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
                    let cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
                    let cof = minor_det(m, &rows, &cols);
                    let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                    cof * &inv_det
                })
                .collect()
        })
        .collect()
}

/// `dω(X, Y) = X(ω(Y)) − Y(ω(X)) − ω([X, Y])`.
pub fn d_oneform(b: &Bundle, w: &dyn Covector, x: &VecField, y: &VecField) -> Expr {
    b.apply(x, &w.apply(y)) - b.apply(y, &w.apply(x)) - w.apply(&b.bracket(x, y))
}

/// The six-term exterior derivative of a 2-form given by its action.
pub fn d_twoform(b: &Bundle, phi: &dyn BilinearForm, x: &VecField, y: &VecField, z: &VecField) -> Expr {
    b.apply(x, &phi.apply(y, z)) - b.apply(y, &phi.apply(x, z)) + b.apply(z, &phi.apply(x, y)) - phi.apply(&b.bracket(x, y), z)
        + phi.apply(&b.bracket(x, z), y)
        - phi.apply(&b.bracket(y, z), x)
}

/// `(i_ξ β)(X) = β(ξ, X)`.
pub fn interior_product<'a>(xi: &'a VecField, beta: &'a dyn BilinearForm) -> impl Covector + 'a {
    move |x: &VecField| beta.apply(xi, x)
}
