//! The quadruple `(φ, η, ξ, G)` and its first-order predicates.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::bundle::{Bundle, Chart, Point, VecField};
use crate::dtensor::{contract, d_oneform, eval_matrix, Covector, Metric, OneForm, TwoTensor};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::verify::{CheckReport, Context, Probe};

/// Singular values above this count towards the rank of `φ`.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// An almost paracontact structure with a block pseudo-metric.
///
/// `phi_h[i][j]` is `φ^i_j` and `phi_v[a][b]` is `φ̄^a_b`; `φ` is block
/// diagonal in the adapted frame by construction.
#[derive(Clone, Debug)]
pub struct PacStructure {
    pub bundle: Bundle,
    pub phi_h: Vec<Vec<Expr>>,
    pub phi_v: Vec<Vec<Expr>>,
    pub eta: OneForm,
    pub xi: VecField,
    pub metric: Metric,
}

fn mat_vec(m: &[Vec<Expr>], x: &[Expr]) -> Vec<Expr> {
    m.iter().map(|row| contract(row, x)).collect()
}

impl PacStructure {
    pub fn chart(&self) -> Chart {
        self.bundle.chart
    }

    /// `φX`.
    pub fn phi(&self, x: &VecField) -> VecField {
        VecField::new(mat_vec(&self.phi_h, &x.h), mat_vec(&self.phi_v, &x.v))
    }

    /// `η^H(X) = η_i X^i`.
    pub fn eta_h(&self, x: &VecField) -> Expr {
        contract(&self.eta.h, &x.h)
    }

    /// `η^V(X) = η̄_a X̄^a`.
    pub fn eta_v(&self, x: &VecField) -> Expr {
        contract(&self.eta.v, &x.v)
    }

    pub fn eta_h_form(&self) -> OneForm {
        self.eta.h_part()
    }

    pub fn eta_v_form(&self) -> OneForm {
        self.eta.v_part()
    }

    pub fn xi_h(&self) -> VecField {
        self.xi.h_proj()
    }

    pub fn xi_v(&self) -> VecField {
        self.xi.v_proj()
    }

    /// `φ² X − X + η^H(X) ξ^H + η^V(X) ξ^V`, the defining residual field.
    pub fn axiom_field(&self, x: &VecField) -> VecField {
        let phi2 = self.phi(&self.phi(x));
        let proj = &self.xi_h().mul_fn(&self.eta_h(x)) + &self.xi_v().mul_fn(&self.eta_v(x));
        &(&phi2 - x) + &proj
    }

    /// Fundamental form `Φ(X, Y) = G(X, φY)` as adapted blocks; the mixed
    /// blocks are zero.
    pub fn fundamental_form(&self) -> TwoTensor {
        let c = self.chart();
        let lower = |g: &[Vec<Expr>], phi: &[Vec<Expr>]| -> Vec<Vec<Expr>> {
            (0..g.len()).map(|i| (0..g.len()).map(|k| Expr::sum((0..g.len()).map(|j| &g[i][j] * &phi[j][k]))).collect()).collect()
        };
        let mut t = TwoTensor::zero(&c);
        t.hh = lower(&self.metric.g, &self.phi_h);
        t.vv = lower(&self.metric.h, &self.phi_v);
        t
    }

    /// `dη^H(X, Y)` with `η^H` regarded as a form on all of `E`.
    pub fn d_eta_h(&self, x: &VecField, y: &VecField) -> Expr {
        d_oneform(&self.bundle, &self.eta_h_form(), x, y)
    }

    pub fn d_eta_v(&self, x: &VecField, y: &VecField) -> Expr {
        d_oneform(&self.bundle, &self.eta_v_form(), x, y)
    }

    /// The `(n+m) × (n+m)` matrix of `φ` at `p`.
    pub fn phi_matrix_at(&self, p: &Point) -> Result<DMatrix<f64>> {
        let (n, m) = (self.chart().n(), self.chart().m());
        let mut out = DMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&eval_matrix(&self.phi_h, p)?);
        out.view_mut((n, n), (m, m)).copy_from(&eval_matrix(&self.phi_v, p)?);
        Ok(out)
    }

    /// Numeric `(ξ, η)` in flat adapted components at `p`.
    pub fn xi_eta_at(&self, p: &Point) -> Result<(Vec<f64>, Vec<f64>)> {
        let roots: Vec<Expr> = self.xi.components().chain(self.eta.h.iter()).chain(self.eta.v.iter()).cloned().collect();
        let mut v = Tape::compile(&roots).eval(p).map_err(|e| Error::domain(e, p))?;
        let eta = v.split_off(self.chart().dim());
        Ok((v, eta))
    }
}

pub(crate) fn require(report: &CheckReport, check: &str, tol: f64) -> Result<()> {
    let worst = report.max();
    if worst < tol {
        Ok(())
    } else {
        Err(Error::Precondition { check: check.to_string(), requires: report.name.clone(), residual: worst })
    }
}

/// Residuals of `φ² = I − η^H⊗ξ^H − η^V⊗ξ^V` over the test fields and of
/// `η^H(ξ^H) = η^V(ξ^V) = 1`.
pub fn check_axioms(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let mut phi2 = Probe::new("phi^2 = I - eta^H*xi^H - eta^V*xi^V");
    for f in &ctx.fields {
        phi2.push_field(&s.axiom_field(&f.field), &[&f.label]);
    }
    let mut nh = Probe::new("eta^H(xi^H) = 1");
    nh.push(s.eta_h(&s.xi) - 1.0, &["xi^H"]);
    let mut nv = Probe::new("eta^V(xi^V) = 1");
    nv.push(s.eta_v(&s.xi) - 1.0, &["xi^V"]);
    Ok(CheckReport::new("almost paracontact", vec![phi2.run(&ctx.points)?, nh.run(&ctx.points)?, nv.run(&ctx.points)?]))
}

/// `φξ^H = φξ^V = 0` and `η^H∘φ = η^V∘φ = 0`, which follow from the axioms.
pub fn derived_identities(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    require(&check_axioms(s, ctx)?, "derived identities", ctx.tolerance)?;
    derived_identities_unchecked(s, ctx)
}

pub(crate) fn derived_identities_unchecked(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let mut a = Probe::new("phi(xi^H) = 0");
    a.push_field(&s.phi(&s.xi_h()), &["xi^H"]);
    let mut b = Probe::new("phi(xi^V) = 0");
    b.push_field(&s.phi(&s.xi_v()), &["xi^V"]);
    let mut c = Probe::new("eta^H o phi = 0");
    let mut d = Probe::new("eta^V o phi = 0");
    for f in &ctx.fields {
        let pf = s.phi(&f.field);
        c.push(s.eta_h(&pf), &[&f.label]);
        d.push(s.eta_v(&pf), &[&f.label]);
    }
    Ok(CheckReport::new("derived identities", vec![a.run(&ctx.points)?, b.run(&ctx.points)?, c.run(&ctx.points)?, d.run(&ctx.points)?]))
}

/// Numeric rank of `φ` at `p`.
pub fn rank_phi(s: &PacStructure, p: &Point) -> Result<usize> {
    let m = s.phi_matrix_at(p)?;
    Ok(m.singular_values().iter().filter(|&&v| v > RANK_THRESHOLD).count())
}

/// Compatibility `G^H(φX, φY) = −G^H(X, Y) + η^H(X)η^H(Y)` and its vertical
/// analogue, plus the consequences `G(X, ξ) = η(X)` and skew-adjointness
/// of `φ` in each block.
pub fn check_compatibility(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    require(&check_axioms(s, ctx)?, "compatibility", ctx.tolerance)?;
    compatibility_unchecked(s, ctx)
}

pub(crate) fn compatibility_unchecked(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let g = &s.metric;
    let frame = s.chart().dim();
    let mut ch = Probe::new("G^H(phi X, phi Y) + G^H(X, Y) - eta^H(X) eta^H(Y)");
    let mut cv = Probe::new("G^V(phi X, phi Y) + G^V(X, Y) - eta^V(X) eta^V(Y)");
    let mut sk_h = Probe::new("G(X^H, phi Y^H) + G(phi X^H, Y^H)");
    let mut sk_v = Probe::new("G(X^V, phi Y^V) + G(phi X^V, Y^V)");
    for (i, j) in ctx.pairs(frame) {
        let (x, y) = (&ctx.fields[i].field, &ctx.fields[j].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str()];
        let (px, py) = (s.phi(x), s.phi(y));
        ch.push(g.apply_h(&px, &py) + g.apply_h(x, y) - s.eta_h(x) * s.eta_h(y), &labels);
        cv.push(g.apply_v(&px, &py) + g.apply_v(x, y) - s.eta_v(x) * s.eta_v(y), &labels);
        sk_h.push(g.apply_h(x, &py) + g.apply_h(&px, y), &labels);
        sk_v.push(g.apply_v(x, &py) + g.apply_v(&px, y), &labels);
    }
    let mut reeb = Probe::new("G(X, xi) - eta(X)");
    for f in &ctx.fields {
        reeb.push(crate::dtensor::BilinearForm::apply(g, &f.field, &s.xi) - s.eta.apply(&f.field), &[&f.label]);
    }
    Ok(CheckReport::new(
        "almost paracontact metric",
        vec![ch.run(&ctx.points)?, cv.run(&ctx.points)?, reeb.run(&ctx.points)?, sk_h.run(&ctx.points)?, sk_v.run(&ctx.points)?],
    ))
}

/// `dη^H(X, Y) = Φ(X^H, Y^H)`, `dη^V(X, Y) = Φ(X^V, Y^V)` and
/// `dη(X^H, Y^V) = dη(X^V, Y^H) = 0`.
pub fn check_paracontact_metric(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    require(&check_axioms(s, ctx)?, "paracontact metric", ctx.tolerance)?;
    require(&compatibility_unchecked(s, ctx)?, "paracontact metric", ctx.tolerance)?;
    paracontact_metric_unchecked(s, ctx)
}

pub(crate) fn paracontact_metric_unchecked(s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    use crate::dtensor::BilinearForm;
    let phi = s.fundamental_form();
    let frame = s.chart().dim();
    let mut hh = Probe::new("d eta^H(X, Y) - Phi(X^H, Y^H)");
    let mut vv = Probe::new("d eta^V(X, Y) - Phi(X^V, Y^V)");
    let mut hv = Probe::new("d eta(X^H, Y^V)");
    let mut vh = Probe::new("d eta(X^V, Y^H)");
    for (i, j) in ctx.pairs(frame) {
        let (x, y) = (&ctx.fields[i].field, &ctx.fields[j].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str()];
        hh.push(s.d_eta_h(x, y) - phi.apply(&x.h_proj(), &y.h_proj()), &labels);
        vv.push(s.d_eta_v(x, y) - phi.apply(&x.v_proj(), &y.v_proj()), &labels);
        hv.push(d_oneform(&s.bundle, &s.eta, &x.h_proj(), &y.v_proj()), &labels);
        vh.push(d_oneform(&s.bundle, &s.eta, &x.v_proj(), &y.h_proj()), &labels);
    }
    Ok(CheckReport::new("paracontact metric", vec![hh.run(&ctx.points)?, vv.run(&ctx.points)?, hv.run(&ctx.points)?, vh.run(&ctx.points)?]))
}

/// Signature `((pos, neg) of g, (pos, neg) of h)` at `p`, by eigenvalue
/// signs.
pub fn signature(s: &PacStructure, p: &Point) -> Result<((usize, usize), (usize, usize))> {
    let (g, h) = s.metric.blocks_at(p)?;
    let count = |m: DMatrix<f64>| {
        let e = SymmetricEigen::new(m).eigenvalues;
        (e.iter().filter(|&&v| v > 0.0).count(), e.iter().filter(|&&v| v < 0.0).count())
    };
    Ok((count(g), count(h)))
}
