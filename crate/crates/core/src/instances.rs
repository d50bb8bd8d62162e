//! Reference structures on the bundle with `k1 = k2 = 1` (and flat models
//! in any dimension).
//!
//! Each 3-dimensional block is built from a frame `(e1, e2, ξ)` and its
//! dual coframe `(θ1, θ2, η)` as
//! `φ = e1 ⊗ θ2 + e2 ⊗ θ1` and `G = θ1² − θ2² + η²`, which satisfies the
//! axioms and compatibility identically. The differential conditions
//! depend on the coframe:
//!
//! | instance | paracontact metric | K-paracontact | normal |
//! |---|---|---|---|
//! | [`flat`] | no | n/a | yes |
//! | [`heisenberg`], [`heisenberg_twisted`], [`sl2`], [`mixed`] | yes | yes | yes |
//! | [`killing_broken`] | yes | no | no |
//! | [`generic`], [`sheared`] | no | n/a | no |

use nalgebra::DMatrix;

use crate::bundle::{Bundle, Chart, NonlinearConnection, VecField};
use crate::dtensor::{Metric, OneForm};
use crate::expr::{parse, Expr};
use crate::structure::PacStructure;

/// One 3-dimensional block: `phi[i][j] = φ^i_j`, `g`, `eta`, `xi`.
#[derive(Clone, Debug)]
pub struct Block {
    pub phi: Vec<Vec<Expr>>,
    pub g: Vec<Vec<Expr>>,
    pub eta: Vec<Expr>,
    pub xi: Vec<Expr>,
}

/// Components of a frame `(e1, e2, ξ)` and its dual coframe `(θ1, θ2, η)`.
pub struct FrameData<'a> {
    pub e1: [&'a str; 3],
    pub e2: [&'a str; 3],
    pub xi: [&'a str; 3],
    pub theta1: [&'a str; 3],
    pub theta2: [&'a str; 3],
    pub eta: [&'a str; 3],
}

fn ex(s: &str) -> Expr {
    parse(s, &Chart::new(1, 1)).unwrap_or_else(|e| panic!("{s}: {e}")).simplify()
}

fn vec3(s: [&str; 3]) -> Vec<Expr> {
    s.iter().map(|t| ex(t)).collect()
}

impl Block {
    /// `φ = e1 ⊗ θ2 + e2 ⊗ θ1`, `G = θ1² − θ2² + η²`.
    pub fn from_frame(d: &FrameData) -> Block {
        let (e1, e2, xi) = (vec3(d.e1), vec3(d.e2), vec3(d.xi));
        let (t1, t2, eta) = (vec3(d.theta1), vec3(d.theta2), vec3(d.eta));
        let phi = (0..3).map(|i| (0..3).map(|j| &e1[i] * &t2[j] + &e2[i] * &t1[j]).collect()).collect();
        let g = (0..3).map(|i| (0..3).map(|j| &t1[i] * &t1[j] - &t2[i] * &t2[j] + &eta[i] * &eta[j]).collect()).collect();
        Block { phi, g, eta, xi }
    }
}

/// Assembles a structure from a horizontal and a vertical block.
pub fn assemble(bundle: Bundle, h: Block, v: Block) -> PacStructure {
    PacStructure {
        bundle,
        phi_h: h.phi,
        phi_v: v.phi,
        eta: OneForm::new(h.eta, v.eta),
        xi: VecField::new(h.xi, v.xi),
        metric: Metric::new(h.g, v.g),
    }
}

fn flat_block(k: usize) -> Block {
    let n = 2 * k + 1;
    let c = |v: f64| Expr::constant(v);
    let mut phi = vec![vec![Expr::zero(); n]; n];
    let mut g = vec![vec![Expr::zero(); n]; n];
    for t in 0..k {
        phi[2 * t][2 * t + 1] = c(1.0);
        phi[2 * t + 1][2 * t] = c(1.0);
        g[2 * t][2 * t] = c(1.0);
        g[2 * t + 1][2 * t + 1] = c(-1.0);
    }
    g[n - 1][n - 1] = c(1.0);
    let mut unit = vec![Expr::zero(); n];
    unit[n - 1] = c(1.0);
    Block { phi, g, eta: unit.clone(), xi: unit }
}

/// The constant model: `φ` swaps `e_{2t-1}` and `e_{2t}`, `η = dx^n`,
/// `ξ = ∂_n`, `g = diag(1, −1, …, 1)`, the same on the fibre, `N ≡ 0`.
pub fn flat(k1: usize, k2: usize) -> PacStructure {
    let c = Chart::new(k1, k2);
    assemble(Bundle::flat(c), flat_block(k1), flat_block(k2))
}

/// The hyperbolic Heisenberg block in variables `v1, v2, v3` (`v` is `x`
/// or `y`): `η = v1 dv2 − dv3`, `ξ = −∂_3`, `G = dv1² − dv2² + η²`.
pub fn heisenberg_block(v: &str) -> Block {
    let e2 = ["0", "1", &format!("{v}1")];
    let eta = ["0", &format!("{v}1"), "-1"];
    Block::from_frame(&FrameData {
        e1: ["1", "0", "0"],
        e2: [e2[0], e2[1], e2[2]],
        xi: ["0", "0", "-1"],
        theta1: ["1", "0", "0"],
        theta2: ["0", "1", "0"],
        eta: [eta[0], eta[1], eta[2]],
    })
}

/// Locally symmetric block on `SL(2, R)` with its bi-invariant metric of
/// constant curvature `−1/4`, in variables `v1, v2, v3`.
pub fn sl2_block(v: &str) -> Block {
    let e = format!("exp(-2*{v}2)");
    let ei = format!("exp(2*{v}2)");
    let s = format!("sin(2*{v}3)");
    let c = format!("cos(2*{v}3)");
    let strs = [
        format!("{e}*{c}"),
        format!("2*{s}"),
        format!("-{e}*{s}"),
        format!("2*{c}"),
        format!("-{ei}*{s}"),
        format!("{c}/2"),
        format!("{s}/2"),
        format!("{ei}*{c}"),
        format!("-{c}/2"),
    ];
    Block::from_frame(&FrameData {
        theta1: [&strs[0], &strs[1], "0"],
        theta2: [&e, "0", "2"],
        eta: [&strs[2], &strs[3], "0"],
        xi: [&strs[4], &strs[5], &strs[6]],
        e1: [&strs[7], &strs[6], &strs[8]],
        e2: ["0", "0", "0.5"],
    })
}

/// Heisenberg blocks on both sides, `N ≡ 0`: the para-Sasakian reference.
pub fn heisenberg() -> PacStructure {
    assemble(Bundle::flat(Chart::new(1, 1)), heisenberg_block("x"), heisenberg_block("y"))
}

/// [`heisenberg`] over the integrable connection `N_1^3 = x2`,
/// `N_2^3 = x1`.
pub fn heisenberg_twisted() -> PacStructure {
    let c = Chart::new(1, 1);
    let mut n = vec![vec![Expr::zero(); 3]; 3];
    n[0][2] = Expr::x(1);
    n[1][2] = Expr::x(0);
    assemble(Bundle::new(c, NonlinearConnection::new(&c, n)), heisenberg_block("x"), heisenberg_block("y"))
}

/// `SL(2, R)` blocks on both sides: locally symmetric para-Sasakian.
pub fn sl2() -> PacStructure {
    assemble(Bundle::flat(Chart::new(1, 1)), sl2_block("x"), sl2_block("y"))
}

/// Heisenberg horizontally and `SL(2, R)` vertically: the vertical block
/// is locally symmetric, the horizontal one is not.
pub fn mixed() -> PacStructure {
    assemble(Bundle::flat(Chart::new(1, 1)), heisenberg_block("x"), sl2_block("y"))
}

/// Paracontact metric but neither K-paracontact nor normal: the
/// horizontal coframe `θ1 = e^{−x3/2} dx1`, `θ2 = e^{x3/2} dx2`,
/// `η = x1 dx2 − dx3` is stretched along the flow of `ξ^H`.
pub fn killing_broken() -> PacStructure {
    let h = Block::from_frame(&FrameData {
        e1: ["exp(0.5*x3)", "0", "0"],
        e2: ["0", "exp(-0.5*x3)", "x1*exp(-0.5*x3)"],
        xi: ["0", "0", "-1"],
        theta1: ["exp(-0.5*x3)", "0", "0"],
        theta2: ["0", "exp(0.5*x3)", "0"],
        eta: ["0", "x1", "-1"],
    });
    assemble(Bundle::flat(Chart::new(1, 1)), h, heisenberg_block("y"))
}

/// Almost paracontact metric with no further structure, over a
/// polynomial nonlinear connection. Built from lower-triangular coframes
/// `θ1 = a dv1`, `θ2 = p dv1 + b dv2`, `η = q dv1 + r dv2 + dv3`.
pub fn generic() -> PacStructure {
    let c = Chart::new(1, 1);
    let tri = |a: &str, b: &str, p: &str, q: &str, r: &str| {
        let e1 = [format!("1/({a})"), format!("-({p})/(({a})*({b}))"), format!("-({q})/({a}) + ({r})*({p})/(({a})*({b}))")];
        let e2 = [format!("1/({b})"), format!("-({r})/({b})")];
        Block::from_frame(&FrameData {
            e1: [&e1[0], &e1[1], &e1[2]],
            e2: ["0", &e2[0], &e2[1]],
            xi: ["0", "0", "1"],
            theta1: [a, "0", "0"],
            theta2: [p, b, "0"],
            eta: [q, r, "1"],
        })
    };
    let h = tri("exp(0.3*x3 + 0.2*y1)", "exp(-0.2*x1)", "0.3*x2*y2", "0.2*x1*x2", "-x1 + 0.1*y3");
    let v = tri("exp(0.1*y2 - 0.2*x1)", "exp(0.25*y3 + 0.1*x2)", "0.2*y1*x3", "0.3*y2*y3", "0.5*y1 - 0.2*x2");
    let n = vec![
        vec![ex("0.1*x2*y1"), Expr::zero(), ex("0.2*x3")],
        vec![Expr::zero(), ex("0.1*y2"), Expr::zero()],
        vec![ex("0.05*x1*y3"), Expr::zero(), Expr::zero()],
    ];
    assemble(Bundle::new(c, NonlinearConnection::new(&c, n)), h, v)
}

/// [`heisenberg`] conjugated horizontally by the shear `∂3 ↦ ∂3 + x1 ∂1`,
/// which makes `φ` depend on `x1` differently: still almost paracontact
/// metric, no longer normal.
pub fn sheared() -> PacStructure {
    let (o, z, x1) = (Expr::one, Expr::zero, || Expr::x(0));
    let a = vec![vec![o(), z(), x1()], vec![z(), o(), z()], vec![z(), z(), o()]];
    let ai = vec![vec![o(), z(), -x1()], vec![z(), o(), z()], vec![z(), z(), o()]];
    let id = vec![vec![o(), z(), z()], vec![z(), o(), z()], vec![z(), z(), o()]];
    conjugate_by(&heisenberg(), (&a, &ai), (&id, &id))
}

fn constant_matrix(m: &DMatrix<f64>) -> Vec<Vec<Expr>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Expr::constant(m[(i, j)])).collect()).collect()
}

fn mul(a: &[Vec<Expr>], b: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    (0..a.len()).map(|i| (0..b[0].len()).map(|j| Expr::sum((0..b.len()).map(|k| &a[i][k] * &b[k][j]))).collect()).collect()
}

fn transpose(a: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn row_times(v: &[Expr], m: &[Vec<Expr>]) -> Vec<Expr> {
    (0..m[0].len()).map(|j| Expr::sum(v.iter().zip(m).map(|(a, r)| a * &r[j]))).collect()
}

fn mat_times(m: &[Vec<Expr>], v: &[Expr]) -> Vec<Expr> {
    m.iter().map(|r| Expr::sum(r.iter().zip(v).map(|(a, b)| a * b))).collect()
}

/// Pointwise change of frame by block matrices `A` (with inverse `A⁻¹`):
/// `φ ↦ AφA⁻¹`, `η ↦ ηA⁻¹`, `ξ ↦ Aξ`, `g ↦ A⁻ᵀ g A⁻¹`. Algebraic
/// identities are preserved; differential ones in general are not.
pub fn conjugate_by(
    s: &PacStructure,
    (a_h, a_h_inv): (&[Vec<Expr>], &[Vec<Expr>]),
    (a_v, a_v_inv): (&[Vec<Expr>], &[Vec<Expr>]),
) -> PacStructure {
    PacStructure {
        bundle: s.bundle.clone(),
        phi_h: mul(&mul(a_h, &s.phi_h), a_h_inv),
        phi_v: mul(&mul(a_v, &s.phi_v), a_v_inv),
        eta: OneForm::new(row_times(&s.eta.h, a_h_inv), row_times(&s.eta.v, a_v_inv)),
        xi: VecField::new(mat_times(a_h, &s.xi.h), mat_times(a_v, &s.xi.v)),
        metric: Metric::new(mul(&mul(&transpose(a_h_inv), &s.metric.g), a_h_inv), mul(&mul(&transpose(a_v_inv), &s.metric.h), a_v_inv)),
    }
}

/// [`conjugate_by`] with constant invertible blocks.
///
/// Panics if a block is singular.
pub fn conjugate(s: &PacStructure, a_h: &DMatrix<f64>, a_v: &DMatrix<f64>) -> PacStructure {
    let hi = a_h.clone().try_inverse().expect("invertible horizontal block");
    let vi = a_v.clone().try_inverse().expect("invertible vertical block");
    conjugate_by(s, (&constant_matrix(a_h), &constant_matrix(&hi)), (&constant_matrix(a_v), &constant_matrix(&vi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{sample_points, spanning_fields, SampleBox};
    use crate::structure::{check_axioms, check_compatibility};
    use crate::verify::Context;

    #[test]
    fn every_instance_is_almost_paracontact_metric() {
        let all = [
            ("flat", flat(1, 1)),
            ("heisenberg", heisenberg()),
            ("twisted", heisenberg_twisted()),
            ("sl2", sl2()),
            ("mixed", mixed()),
            ("killing_broken", killing_broken()),
            ("generic", generic()),
            ("sheared", sheared()),
        ];
        for (name, s) in all {
            let c = s.chart();
            let ctx = Context::new(sample_points(&SampleBox::uniform(&c, -0.5, 0.5), 8, 1), spanning_fields(&c, 2, 1), 1e-8);
            assert!(check_axioms(&s, &ctx).unwrap().max() < 1e-12, "{name}");
            assert!(check_compatibility(&s, &ctx).unwrap().max() < 1e-12, "{name}");
        }
    }

    #[test]
    fn conjugation_preserves_the_algebra() {
        let s = heisenberg();
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, -0.3, 2.0, 0.1, 0.2, 0.0, 1.5]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.4, 0.3, 0.0, 1.0]);
        let t = conjugate(&s, &a, &b);
        let c = t.chart();
        let ctx = Context::new(sample_points(&SampleBox::uniform(&c, -0.5, 0.5), 8, 2), spanning_fields(&c, 2, 2), 1e-8);
        assert!(check_axioms(&t, &ctx).unwrap().max() < 1e-10);
        assert!(check_compatibility(&t, &ctx).unwrap().max() < 1e-10);
    }

    #[test]
    fn paracontact_metric_table() {
        let cases = [
            ("flat", flat(1, 1), false),
            ("heisenberg", heisenberg(), true),
            ("twisted", heisenberg_twisted(), true),
            ("sl2", sl2(), true),
            ("mixed", mixed(), true),
            ("killing_broken", killing_broken(), true),
            ("generic", generic(), false),
            ("sheared", sheared(), false),
        ];
        for (name, s, expected) in cases {
            let c = s.chart();
            let ctx = Context::new(sample_points(&SampleBox::uniform(&c, -0.5, 0.5), 8, 1), spanning_fields(&c, 2, 1), 1e-8);
            let r = crate::structure::check_paracontact_metric(&s, &ctx).unwrap();
            assert_eq!(r.max() < 1e-9, expected, "{name}: {}", r.max());
        }
    }
}
