//! Lie derivatives, the Nijenhuis tensor of `φ`, the four normality
//! tensors and the classification ladder.

use crate::bundle::{Bundle, VecField};
use crate::dtensor::{BilinearForm, Covector};
use crate::error::Result;
use crate::expr::Expr;
use crate::structure::{self, require, PacStructure};
use crate::verify::{CheckReport, Context, Probe, Residual};

/// `L_X Y = [X, Y]`.
pub fn lie_vec(b: &Bundle, x: &VecField, y: &VecField) -> VecField {
    b.bracket(x, y)
}

/// `(L_X ω)(Y) = X(ω(Y)) − ω([X, Y])`.
pub fn lie_oneform(b: &Bundle, x: &VecField, w: &dyn Covector, y: &VecField) -> Expr {
    b.apply(x, &w.apply(y)) - w.apply(&b.bracket(x, y))
}

/// `(L_X G)(Y, Z) = X(G(Y, Z)) − G([X, Y], Z) − G(Y, [X, Z])`.
pub fn lie_metric(b: &Bundle, x: &VecField, g: &dyn BilinearForm, y: &VecField, z: &VecField) -> Expr {
    b.apply(x, &g.apply(y, z)) - g.apply(&b.bracket(x, y), z) - g.apply(y, &b.bracket(x, z))
}

/// `(L_X φ)(Y) = [X, φY] − φ[X, Y]`.
pub fn lie_phi(s: &PacStructure, x: &VecField, y: &VecField) -> VecField {
    let b = &s.bundle;
    &b.bracket(x, &s.phi(y)) - &s.phi(&b.bracket(x, y))
}

/// `N_φ(X, Y) = φ²[X, Y] + [φX, φY] − φ[φX, Y] − φ[X, φY]`.
pub fn nijenhuis(s: &PacStructure, x: &VecField, y: &VecField) -> VecField {
    let b = &s.bundle;
    let (px, py) = (s.phi(x), s.phi(y));
    let a = s.phi(&s.phi(&b.bracket(x, y)));
    let c = s.phi(&(&b.bracket(&px, y) + &b.bracket(x, &py)));
    &(&a + &b.bracket(&px, &py)) - &c
}

/// `N⁽¹⁾(X, Y) = N_φ(X, Y) − dη^H(X, Y) ξ^H − dη^V(X, Y) ξ^V`.
pub fn n1(s: &PacStructure, x: &VecField, y: &VecField) -> VecField {
    let corr = &s.xi_h().mul_fn(&s.d_eta_h(x, y)) + &s.xi_v().mul_fn(&s.d_eta_v(x, y));
    &nijenhuis(s, x, y) - &corr
}

/// The three cases of `N⁽²⁾`, each evaluated on the relevant projections
/// of `X` and `Y`:
///
/// * `(L_{φX^H} η^H)(Y^H) − (L_{φY^H} η^H)(X^H)`
/// * `(L_{φX^V} η^V)(Y^V) − (L_{φY^V} η^V)(X^V)`
/// * `(L_{φX^V} η^H)(Y^H) + (L_{φX^V} η^V)(Y^H) − (L_{φY^H} η^H)(X^V) − (L_{φY^H} η^V)(X^V)`
pub fn n2(s: &PacStructure, x: &VecField, y: &VecField) -> [Expr; 3] {
    let b = &s.bundle;
    let (eh, ev) = (s.eta_h_form(), s.eta_v_form());
    let (xh, xv, yh, yv) = (x.h_proj(), x.v_proj(), y.h_proj(), y.v_proj());
    let (pxh, pxv, pyh, pyv) = (s.phi(&xh), s.phi(&xv), s.phi(&yh), s.phi(&yv));
    let hh = lie_oneform(b, &pxh, &eh, &yh) - lie_oneform(b, &pyh, &eh, &xh);
    let vv = lie_oneform(b, &pxv, &ev, &yv) - lie_oneform(b, &pyv, &ev, &xv);
    let mixed =
        lie_oneform(b, &pxv, &eh, &yh) + lie_oneform(b, &pxv, &ev, &yh) - lie_oneform(b, &pyh, &eh, &xv) - lie_oneform(b, &pyh, &ev, &xv);
    [hh, vv, mixed]
}

/// The four cases of `N⁽³⁾`: `(L_{ξ^H} φ)(X^H)`, `(L_{ξ^V} φ)(X^V)`,
/// `(L_{ξ^V} φ)(X^H)`, `(L_{ξ^H} φ)(X^V)`.
pub fn n3(s: &PacStructure, x: &VecField) -> [VecField; 4] {
    let (xh, xv, zh, zv) = (x.h_proj(), x.v_proj(), s.xi_h(), s.xi_v());
    [lie_phi(s, &zh, &xh), lie_phi(s, &zv, &xv), lie_phi(s, &zv, &xh), lie_phi(s, &zh, &xv)]
}

/// The four cases of `N⁽⁴⁾`: `(L_{ξ^H} η^H)(X^H)`, `(L_{ξ^V} η^V)(X^V)`,
/// `(L_{ξ^V} η^H)(X^H)`, `(L_{ξ^H} η^V)(X^V)`.
pub fn n4(s: &PacStructure, x: &VecField) -> [Expr; 4] {
    let b = &s.bundle;
    let (xh, xv, zh, zv) = (x.h_proj(), x.v_proj(), s.xi_h(), s.xi_v());
    let (eh, ev) = (s.eta_h_form(), s.eta_v_form());
    [lie_oneform(b, &zh, &eh, &xh), lie_oneform(b, &zv, &ev, &xv), lie_oneform(b, &zv, &eh, &xh), lie_oneform(b, &zh, &ev, &xv)]
}

const N2_CASES: [&str; 3] = ["N2(X^H, Y^H)", "N2(X^V, Y^V)", "N2(X^V, Y^H)"];
const N3_CASES: [&str; 4] = ["N3: (L_xi^H phi)(X^H)", "N3: (L_xi^V phi)(X^V)", "N3: (L_xi^V phi)(X^H)", "N3: (L_xi^H phi)(X^V)"];
const N4_CASES: [&str; 4] = ["N4: (L_xi^H eta^H)(X^H)", "N4: (L_xi^V eta^V)(X^V)", "N4: (L_xi^V eta^H)(X^H)", "N4: (L_xi^H eta^V)(X^V)"];

/// Residuals of `N⁽¹⁾` to `N⁽⁴⁾`, every case reported separately.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalityReport {
    pub n1: CheckReport,
    pub n2: CheckReport,
    pub n3: CheckReport,
    pub n4: CheckReport,
}

impl NormalityReport {
    pub fn reports(&self) -> [&CheckReport; 4] {
        [&self.n1, &self.n2, &self.n3, &self.n4]
    }
}

pub fn normality_tensors(s: &PacStructure, ctx: &Context) -> Result<NormalityReport> {
    require(&structure::check_axioms(s, ctx)?, "normality tensors", ctx.tolerance)?;
    normality_unchecked(s, ctx)
}

pub(crate) fn normality_unchecked(s: &PacStructure, ctx: &Context) -> Result<NormalityReport> {
    let frame = s.chart().dim();
    let mut p1 = Probe::new("N1(X, Y)");
    let mut p2 = N2_CASES.map(Probe::new);
    for (i, j) in ctx.pairs(frame) {
        let (x, y) = (&ctx.fields[i].field, &ctx.fields[j].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str()];
        p1.push_field(&n1(s, x, y), &labels);
        for (p, e) in p2.iter_mut().zip(n2(s, x, y)) {
            p.push(e, &labels);
        }
    }
    let mut p3 = N3_CASES.map(Probe::new);
    let mut p4 = N4_CASES.map(Probe::new);
    for f in &ctx.fields {
        for (p, v) in p3.iter_mut().zip(n3(s, &f.field)) {
            p.push_field(&v, &[&f.label]);
        }
        for (p, e) in p4.iter_mut().zip(n4(s, &f.field)) {
            p.push(e, &[&f.label]);
        }
    }
    let run = |ps: Vec<Probe>| ps.into_iter().map(|p| p.run(&ctx.points)).collect::<Result<Vec<_>>>();
    Ok(NormalityReport {
        n1: CheckReport::new("N1", vec![p1.run(&ctx.points)?]),
        n2: CheckReport::new("N2", run(p2.into())?),
        n3: CheckReport::new("N3", run(p3.into())?),
        n4: CheckReport::new("N4", run(p4.into())?),
    })
}

/// `(L_{ξ^H} G^H)(X, Y)` over the test-field pairs, with
/// `G^H(X, Y) = G(X^H, Y^H)`.
pub fn is_killing_h(s: &PacStructure, ctx: &Context) -> Result<Residual> {
    require(&structure::check_paracontact_metric(s, ctx)?, "Killing", ctx.tolerance)?;
    killing_unchecked(s, ctx, true)
}

/// `(L_{ξ^V} G^V)(X, Y)` over the test-field pairs.
pub fn is_killing_v(s: &PacStructure, ctx: &Context) -> Result<Residual> {
    require(&structure::check_paracontact_metric(s, ctx)?, "Killing", ctx.tolerance)?;
    killing_unchecked(s, ctx, false)
}

pub(crate) fn killing_unchecked(s: &PacStructure, ctx: &Context, horizontal: bool) -> Result<Residual> {
    let g = &s.metric;
    let (name, xi) = if horizontal { ("(L_xi^H G^H)(X, Y)", s.xi_h()) } else { ("(L_xi^V G^V)(X, Y)", s.xi_v()) };
    let gh = |a: &VecField, b: &VecField| g.apply_h(a, b);
    let gv = |a: &VecField, b: &VecField| g.apply_v(a, b);
    let form: &dyn BilinearForm = if horizontal { &gh } else { &gv };
    let mut p = Probe::new(name);
    for (i, j) in ctx.pairs(s.chart().dim()) {
        let (x, y) = (&ctx.fields[i].field, &ctx.fields[j].field);
        p.push(lie_metric(&s.bundle, &xi, form, x, y), &[&ctx.fields[i].label, &ctx.fields[j].label]);
    }
    p.run(&ctx.points)
}

/// One rung of the ladder. `residual` is `None` when a lower rung failed
/// and the quantity was not evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Rung {
    pub name: &'static str,
    pub holds: bool,
    pub residual: Option<f64>,
}

/// An implication between rungs and normality tensors that must hold for
/// every structure; `holds` is true when the hypothesis is vacuous.
#[derive(Clone, Debug, PartialEq)]
pub struct Consistency {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ladder {
    pub rungs: Vec<Rung>,
    pub normality: Option<NormalityReport>,
    pub killing: Option<(Residual, Residual)>,
    pub consistency: Vec<Consistency>,
}

pub const RUNGS: [&str; 6] =
    ["almost paracontact", "almost paracontact metric", "paracontact metric", "K-paracontact", "normal", "para-Sasakian"];

impl Ladder {
    pub fn holds(&self, rung: &str) -> bool {
        self.rungs.iter().any(|r| r.name == rung && r.holds)
    }

    /// The highest rung reached, in ladder order, or `None` if the axioms
    /// fail.
    pub fn top(&self) -> Option<&'static str> {
        self.rungs.iter().filter(|r| r.holds).map(|r| r.name).next_back()
    }
}

/// Runs the ladder, evaluating each rung only when the rungs it depends on
/// hold, and checks the implications between rungs.
pub fn classify(s: &PacStructure, ctx: &Context) -> Result<Ladder> {
    let tol = ctx.tolerance;
    let mut rungs = Vec::new();
    let mut rung = |name, residual: Option<f64>, gate: bool| {
        let holds = gate && residual.is_some_and(|r| r < tol);
        rungs.push(Rung { name, holds, residual });
        holds
    };
    let axioms = structure::check_axioms(s, ctx)?.max();
    let apc = rung(RUNGS[0], Some(axioms), true);
    let compat = if apc { Some(structure::compatibility_unchecked(s, ctx)?.max()) } else { None };
    let apcm = rung(RUNGS[1], compat, apc);
    let pcm_res = if apcm { Some(structure::paracontact_metric_unchecked(s, ctx)?.max()) } else { None };
    let pcm = rung(RUNGS[2], pcm_res, apcm);
    let killing = if apcm { Some((killing_unchecked(s, ctx, true)?, killing_unchecked(s, ctx, false)?)) } else { None };
    let kres = killing.as_ref().map(|(h, v)| h.value.max(v.value));
    let kpc = rung(RUNGS[3], kres, pcm);
    let normality = if apc { Some(normality_unchecked(s, ctx)?) } else { None };
    let nres = normality.as_ref().map(|n| n.n1.max());
    let normal = rung(RUNGS[4], nres, apc);
    let ps_res = pcm_res.zip(nres).map(|(a, b)| a.max(b));
    let sasakian = rung(RUNGS[5], ps_res, pcm && normal);

    let mut consistency = vec![Consistency { name: "para-Sasakian implies K-paracontact", holds: !sasakian || kpc }];
    if let Some(n) = &normality {
        let below = |r: &CheckReport| r.max() < tol;
        consistency.push(Consistency {
            name: "normal implies N2 = N3 = N4 = 0",
            holds: !normal || (below(&n.n2) && below(&n.n3) && below(&n.n4)),
        });
        consistency.push(Consistency { name: "paracontact metric implies N2 = N4 = 0", holds: !pcm || (below(&n.n2) && below(&n.n4)) });
        consistency.push(Consistency { name: "paracontact metric: K-paracontact iff N3 = 0", holds: !pcm || kpc == below(&n.n3) });
    }
    Ok(Ladder { rungs, normality, killing, consistency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Chart, Point};
    use crate::dtensor::d_oneform;
    use crate::instances;
    use crate::sample::{random_field, sample_points, spanning_fields, SampleBox};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(c: &Chart) -> Context {
        Context::new(sample_points(&SampleBox::uniform(c, -0.5, 0.5), 6, 5), spanning_fields(c, 3, 5), 1e-8)
    }

    fn at(e: &Expr) -> f64 {
        e.eval(&Point::new(vec![0.3, -0.2, 0.4], vec![0.1, 0.25, -0.35])).unwrap()
    }

    fn field_max(f: &VecField) -> f64 {
        f.components().map(|e| at(e).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn lie_derivative_identities() {
        let s = instances::generic();
        let c = s.chart();
        let b = &s.bundle;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (x, y, z) = (random_field(&c, 2, &mut rng), random_field(&c, 2, &mut rng), random_field(&c, 2, &mut rng));
        assert_eq!(field_max(&lie_vec(b, &x, &x)), 0.0);
        let g = &s.metric;
        let sym = lie_metric(b, &x, g, &y, &z) - lie_metric(b, &x, g, &z, &y);
        assert!(at(&sym).abs() < 1e-10);
        // η(ξ) = 1 makes (L_ξ η)(X) = −dη(X, ξ)
        let w = s.eta_h_form();
        let xi = s.xi_h();
        let e = lie_oneform(b, &xi, &w, &y) + d_oneform(b, &w, &y, &xi);
        assert!(at(&e).abs() < 1e-10);
    }

    #[test]
    fn nijenhuis_basics() {
        let s = instances::generic();
        let c = s.chart();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x, y) = (random_field(&c, 2, &mut rng), random_field(&c, 2, &mut rng));
        assert!(field_max(&nijenhuis(&s, &x, &x)) < 1e-10);
        assert!(field_max(&(&nijenhuis(&s, &x, &y) + &nijenhuis(&s, &y, &x))) < 1e-10);
        let f = instances::flat(1, 1);
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                let r = nijenhuis(&f, &VecField::frame(&c, i), &VecField::frame(&c, j));
                assert!(r.components().all(Expr::is_zero));
            }
        }
    }

    #[test]
    fn normality_of_instances() {
        for s in [instances::heisenberg(), instances::sl2(), instances::heisenberg_twisted(), instances::flat(1, 1)] {
            let r = normality_tensors(&s, &ctx(&s.chart())).unwrap();
            for rep in r.reports() {
                assert!(rep.max() < 1e-9, "{}: {}", rep.name, rep.max());
            }
        }
        let s = instances::sheared();
        let r = normality_tensors(&s, &ctx(&s.chart())).unwrap();
        assert!(r.n1.max() > 1e-3);
        assert!(r.n1.worst().witness.is_some());
    }

    #[test]
    fn killing_and_ladder() {
        let s = instances::heisenberg();
        let c = ctx(&s.chart());
        assert!(is_killing_h(&s, &c).unwrap().value < 1e-9);
        assert!(is_killing_v(&s, &c).unwrap().value < 1e-9);
        let l = classify(&s, &c).unwrap();
        assert_eq!(l.top(), Some("para-Sasakian"));
        assert!(l.rungs.iter().all(|r| r.holds));
        assert!(l.consistency.iter().all(|k| k.holds));

        let k = instances::killing_broken();
        let c = ctx(&k.chart());
        assert!(is_killing_h(&k, &c).unwrap().value > 1e-3);
        let l = classify(&k, &c).unwrap();
        assert!(l.holds("paracontact metric"));
        assert!(!l.holds("K-paracontact"));
        assert!(l.normality.as_ref().unwrap().n3.max() > 1e-3);
        assert!(l.consistency.iter().all(|k| k.holds), "{:?}", l.consistency);

        let f = instances::flat(1, 1);
        let l = classify(&f, &ctx(&f.chart())).unwrap();
        assert!(l.holds("almost paracontact metric"));
        assert!(!l.holds("paracontact metric"));
        assert!(!l.holds("para-Sasakian"));
    }

    #[test]
    fn killing_vertical_block_of_horizontal_form_vanishes() {
        let s = instances::generic();
        let c = s.chart();
        let g = |a: &VecField, b: &VecField| s.metric.apply_h(a, b);
        for a in 0..c.m() {
            for b in 0..c.m() {
                let e = lie_metric(&s.bundle, &s.xi_h(), &g, &VecField::partial_y(&c, a), &VecField::partial_y(&c, b));
                assert!(e.is_zero());
            }
        }
    }
}
