//! Curvature of a d-connection, flag curvatures, pseudo-orthonormal frames,
//! Ricci tensors and the curvature identities of K-paracontact and
//! para-Sasakian structures.
//!
//! The curvature is built symbolically on the adapted frame,
//!
//! ```text
//! R(e_i, e_j) e_k = (e_i(Γ_jk^l) − e_j(Γ_ik^l) + Γ_jk^m Γ_im^l − Γ_ik^m Γ_jm^l − c_ij^m Γ_mk^l) e_l
//! ```
//!
//! with `[e_i, e_j] = c_ij^m e_m`, and then evaluated at points. Everything
//! downstream (flag curvature, Ricci, the identities) is tensorial and so
//! is computed from point values.

use nalgebra::{DMatrix, DVector};

use crate::bundle::{Chart, Point, VecField};
use crate::connection::{cov_deriv, cov_deriv_phi, FinslerConnection};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::structure::PacStructure;
use crate::verify::{Context, Probe, Residual, Status, Witness};

/// Planes with `|Gram determinant|` at or below this are degenerate.
pub const DEGENERATE_GRAM: f64 = 1e-10;

/// `R(X, Y)Z = D_X D_Y Z − D_Y D_X Z − D_{[X, Y]} Z` straight from the
/// definition.
pub fn riemann(d: &FinslerConnection, x: &VecField, y: &VecField, z: &VecField) -> VecField {
    let xy = cov_deriv(d, x, &cov_deriv(d, y, z));
    let yx = cov_deriv(d, y, &cov_deriv(d, x, z));
    &(&xy - &yx) - &cov_deriv(d, &d.bundle.bracket(x, y), z)
}

/// Frame components `R_ijk^l` of the curvature, `R(e_i, e_j)e_k = R_ijk^l e_l`.
#[derive(Clone, Debug)]
pub struct Curvature {
    chart: Chart,
    comps: Vec<Expr>,
}

impl Curvature {
    pub fn new(d: &FinslerConnection) -> Curvature {
        let c = d.chart();
        let dim = c.dim();
        let gamma = d.gamma_table();
        let flat: Vec<Expr> = gamma.iter().flatten().flatten().cloned().collect();
        let idx = |p: usize, q: usize, r: usize| (p * dim + q) * dim + r;
        let dgamma: Vec<Vec<Expr>> = (0..dim).map(|p| d.bundle.apply_all(&VecField::frame(&c, p), &flat)).collect();
        let frame: Vec<VecField> = (0..dim).map(|k| VecField::frame(&c, k)).collect();
        let mut comps = vec![Expr::zero(); dim.pow(4)];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let br = d.bundle.bracket(&frame[i], &frame[j]);
                let cij: Vec<Expr> = br.components().cloned().collect();
                for k in 0..dim {
                    for l in 0..dim {
                        if (k < c.n()) != (l < c.n()) {
                            continue;
                        }
                        let quad =
                            Expr::sum((0..dim).map(|m| {
                                &gamma[j][k][m] * &gamma[i][m][l] - &gamma[i][k][m] * &gamma[j][m][l] - &cij[m] * &gamma[m][k][l]
                            }));
                        let e = &dgamma[i][idx(j, k, l)] - &dgamma[j][idx(i, k, l)] + quad;
                        comps[((j * dim + i) * dim + k) * dim + l] = -&e;
                        comps[((i * dim + j) * dim + k) * dim + l] = e;
                    }
                }
            }
        }
        Curvature { chart: c, comps }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> &Expr {
        let d = self.chart.dim();
        &self.comps[((i * d + j) * d + k) * d + l]
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    /// `R(X, Y)Z` by contracting the frame components.
    pub fn apply(&self, x: &VecField, y: &VecField, z: &VecField) -> VecField {
        let dim = self.chart.dim();
        let (xs, ys, zs): (Vec<&Expr>, Vec<&Expr>, Vec<&Expr>) =
            (x.components().collect(), y.components().collect(), z.components().collect());
        let out = (0..dim)
            .map(|l| {
                Expr::sum((0..dim).flat_map(|i| (0..dim).flat_map(move |j| (0..dim).map(move |k| (i, j, k)))).map(|(i, j, k)| {
                    let r = self.component(i, j, k, l);
                    if r.is_zero() || xs[i].is_zero() || ys[j].is_zero() || zs[k].is_zero() {
                        Expr::zero()
                    } else {
                        xs[i] * ys[j] * zs[k] * r
                    }
                }))
            })
            .collect();
        VecField::from_flat(&self.chart, out)
    }
}

/// Everything needed at one point, as numbers.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: Point,
    pub chart: Chart,
    /// Block-diagonal `G` in the adapted frame.
    pub metric: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub xi_h: DVector<f64>,
    pub xi_v: DVector<f64>,
    pub eta_h: DVector<f64>,
    pub eta_v: DVector<f64>,
    r: Vec<f64>,
    /// `bracket_xi[i * n + j] = D_{[δ_i, δ_j]^V} ξ^H`.
    bracket_xi: Vec<DVector<f64>>,
}

/// A pseudo-orthonormal frame `E_1..E_{2k}, ξ` of one distribution:
/// `G(E_i, E_j) = ε_i δ_ij`, `G(E_i, ξ) = 0`, `G(ξ, ξ) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoFrame {
    pub fields: Vec<DVector<f64>>,
    pub signs: Vec<f64>,
    pub xi: DVector<f64>,
}

impl PseudoFrame {
    /// `(E_1, ε_1), …, (E_{2k}, ε_{2k}), (ξ, 1)`.
    pub fn with_xi(&self) -> impl Iterator<Item = (&DVector<f64>, f64)> {
        self.fields.iter().zip(self.signs.iter().copied()).chain(std::iter::once((&self.xi, 1.0)))
    }
}

impl PointGeometry {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn g(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.metric * y))
    }

    /// `R(X, Y)Z` at the point.
    pub fn riemann(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let mut out = DVector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0.0 || i == j {
                    continue;
                }
                for k in 0..d {
                    let w = x[i] * y[j] * z[k];
                    if w == 0.0 {
                        continue;
                    }
                    let base = ((i * d + j) * d + k) * d;
                    for l in 0..d {
                        out[l] += w * self.r[base + l];
                    }
                }
            }
        }
        out
    }

    /// Horizontal or vertical part of a flat adapted vector.
    pub fn project(&self, x: &DVector<f64>, horizontal: bool) -> DVector<f64> {
        let n = self.chart.n();
        DVector::from_iterator(self.dim(), (0..self.dim()).map(|k| if (k < n) == horizontal { x[k] } else { 0.0 }))
    }

    pub fn xi(&self, horizontal: bool) -> &DVector<f64> {
        if horizontal {
            &self.xi_h
        } else {
            &self.xi_v
        }
    }

    pub fn eta(&self, horizontal: bool, x: &DVector<f64>) -> f64 {
        if horizontal {
            self.eta_h.dot(x)
        } else {
            self.eta_v.dot(x)
        }
    }

    /// `K(X, Y) = G(R(X, Y)Y, X) / (G(X, X)G(Y, Y) − G(X, Y)²)`.
    pub fn flag_curvature(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let gram = self.g(x, x) * self.g(y, y) - self.g(x, y).powi(2);
        if gram.abs() <= DEGENERATE_GRAM {
            return Err(Error::DegeneratePlane { gram });
        }
        Ok(self.g(&self.riemann(x, y, y), x) / gram)
    }

    /// Flag curvature of the plane `span{X, φX}`.
    pub fn vertical_phi_flag(&self, x: &DVector<f64>) -> Result<f64> {
        self.flag_curvature(x, &(&self.phi * x))
    }

    /// `D^V_{[X, Y]} ξ^H = X^i Y^j D_{[δ_i, δ_j]^V} ξ^H` for horizontal `X, Y`.
    pub fn bracket_correction(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.chart.n();
        let mut out = DVector::zeros(self.dim());
        for i in 0..n {
            for j in 0..n {
                let w = x[i] * y[j];
                if w != 0.0 {
                    out += &self.bracket_xi[i * n + j] * w;
                }
            }
        }
        out
    }

    /// Hyperbolic Gram–Schmidt in one distribution, starting from `ξ` and
    /// taking at each step the remaining candidate with the largest
    /// `|G(v, v)|` after projection. `candidates` defaults to the adapted
    /// frame of the distribution.
    pub fn pseudo_orthonormal_frame(&self, horizontal: bool, candidates: Option<&[DVector<f64>]>) -> Result<PseudoFrame> {
        let n = self.chart.n();
        let range: Vec<usize> = if horizontal { (0..n).collect() } else { (n..self.dim()).collect() };
        let mut pool: Vec<DVector<f64>> = match candidates {
            Some(c) => c.iter().map(|v| self.project(v, horizontal)).collect(),
            None => range
                .iter()
                .map(|&k| {
                    let mut v = DVector::zeros(self.dim());
                    v[k] = 1.0;
                    v
                })
                .collect(),
        };
        let xi0 = self.xi(horizontal).clone();
        let nxi = self.g(&xi0, &xi0);
        if nxi.abs() <= DEGENERATE_GRAM {
            return Err(Error::DegeneratePivot { threshold: DEGENERATE_GRAM });
        }
        let xi = xi0 / nxi.abs().sqrt();
        let mut basis: Vec<(DVector<f64>, f64)> = vec![(xi.clone(), nxi.signum())];
        let mut fields = Vec::new();
        let mut signs = Vec::new();
        while basis.len() < range.len() {
            let projected: Vec<DVector<f64>> = pool
                .iter()
                .map(|v| {
                    basis.iter().fold(v.clone(), |acc, (e, s)| {
                        let c = self.g(v, e) * s;
                        acc - e * c
                    })
                })
                .collect();
            let best = projected.iter().enumerate().map(|(k, v)| (k, self.g(v, v).abs())).max_by(|a, b| a.1.total_cmp(&b.1));
            let Some((k, norm)) = best.filter(|(_, norm)| *norm > DEGENERATE_GRAM) else {
                return Err(Error::DegeneratePivot { threshold: DEGENERATE_GRAM });
            };
            let v = &projected[k];
            let s = self.g(v, v).signum();
            let e = v / norm.sqrt();
            basis.push((e.clone(), s));
            fields.push(e);
            signs.push(s);
            pool.remove(k);
        }
        Ok(PseudoFrame { fields, signs, xi })
    }

    /// `S(X, Y) = Σ ε_i G(R(E_i, X)Y, E_i)` over a pseudo-orthonormal frame
    /// (including `ξ`).
    pub fn ricci(&self, frame: &PseudoFrame, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        frame.with_xi().map(|(e, s)| s * self.g(&self.riemann(e, x, y), e)).sum()
    }

    /// `Σ ε_i G(D^V_{[E_i, X]} ξ^H, E_i)` over the horizontal frame without
    /// `ξ`.
    pub fn ricci_correction(&self, frame: &PseudoFrame, x: &DVector<f64>) -> f64 {
        frame.fields.iter().zip(&frame.signs).map(|(e, s)| s * self.g(&self.bracket_correction(e, x), e)).sum()
    }
}

/// Symbolic curvature plus the data the identities need, compiled once and
/// evaluated per point.
pub struct Geometry {
    pub chart: Chart,
    pub curvature: Curvature,
    tape: Tape,
}

impl Geometry {
    pub fn new(s: &PacStructure, d: &FinslerConnection) -> Geometry {
        let c = s.chart();
        let n = c.n();
        let curvature = Curvature::new(d);
        let mut roots: Vec<Expr> = Vec::new();
        roots.extend(s.metric.g.iter().flatten().cloned());
        roots.extend(s.metric.h.iter().flatten().cloned());
        roots.extend(s.phi_h.iter().flatten().cloned());
        roots.extend(s.phi_v.iter().flatten().cloned());
        roots.extend(s.xi.components().cloned());
        roots.extend(s.eta.h.iter().cloned());
        roots.extend(s.eta.v.iter().cloned());
        roots.extend(curvature.components().iter().cloned());
        let xi_h = s.xi_h();
        for i in 0..n {
            for j in 0..n {
                let br = d.bundle.bracket(&VecField::delta(&c, i), &VecField::delta(&c, j)).v_proj();
                roots.extend(cov_deriv(d, &br, &xi_h).components().cloned());
            }
        }
        Geometry { chart: c, curvature, tape: Tape::compile(&roots) }
    }

    pub fn at(&self, p: &Point) -> Result<PointGeometry> {
        let (n, m, dim) = (self.chart.n(), self.chart.m(), self.chart.dim());
        let vals = self.tape.eval(p).map_err(|e| Error::domain(e, p))?;
        let mut it = vals.into_iter();
        let mut take = |k: usize| -> Vec<f64> { it.by_ref().take(k).collect() };
        let g = take(n * n);
        let h = take(m * m);
        let ph = take(n * n);
        let pv = take(m * m);
        let xi = take(dim);
        let eh = take(n);
        let ev = take(m);
        let r = take(dim.pow(4));
        let bx: Vec<DVector<f64>> = (0..n * n).map(|_| DVector::from_vec(take(dim))).collect();
        let block = |a: &[f64], b: &[f64]| {
            let mut out = DMatrix::zeros(dim, dim);
            out.view_mut((0, 0), (n, n)).copy_from(&DMatrix::from_row_slice(n, n, a));
            out.view_mut((n, n), (m, m)).copy_from(&DMatrix::from_row_slice(m, m, b));
            out
        };
        let pad = |h: &[f64], v: &[f64]| DVector::from_iterator(dim, h.iter().copied().chain(v.iter().copied()));
        Ok(PointGeometry {
            point: p.clone(),
            chart: self.chart,
            metric: block(&g, &h),
            phi: block(&ph, &pv),
            xi_h: pad(&xi[..n], &vec![0.0; m]),
            xi_v: pad(&vec![0.0; n], &xi[n..]),
            eta_h: pad(&eh, &vec![0.0; m]),
            eta_v: pad(&vec![0.0; n], &ev),
            r,
            bracket_xi: bx,
        })
    }
}

/// Which part of the curvature the local-symmetry residual looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// `(D_W R)(X, Y)Z` over all frame fields.
    All,
    /// `X, Y, Z` vertical, `W` arbitrary.
    Vertical,
}

/// `(D_W R)(X, Y)Z` on frame fields, evaluated numerically from the
/// symbolic frame derivatives of `R_ijk^l` and the connection
/// coefficients:
/// `e_w(R_ijk^l) + R_ijk^m Γ_wm^l − Γ_wi^m R_mjk^l − Γ_wj^m R_imk^l − Γ_wk^m R_ijm^l`.
pub struct CurvatureDerivative {
    chart: Chart,
    tape: Tape,
}

impl CurvatureDerivative {
    pub fn new(d: &FinslerConnection, r: &Curvature) -> CurvatureDerivative {
        let c = d.chart();
        let mut roots: Vec<Expr> = r.components().to_vec();
        roots.extend(d.gamma_table().into_iter().flatten().flatten());
        for w in 0..c.dim() {
            roots.extend(d.bundle.apply_all(&VecField::frame(&c, w), r.components()));
        }
        CurvatureDerivative { chart: c, tape: Tape::compile(&roots) }
    }

    /// Max-abs of the frame components of `D R` in `scope` at `p`.
    pub fn local_symmetry_residual(&self, p: &Point, scope: Scope) -> Result<f64> {
        let d = self.chart.dim();
        let n = self.chart.n();
        let v = self.tape.eval(p).map_err(|e| Error::domain(e, p))?;
        let d4 = d.pow(4);
        let (r, rest) = v.split_at(d4);
        let (gamma, dr) = rest.split_at(d * d * d);
        let ri = |i: usize, j: usize, k: usize, l: usize| r[((i * d + j) * d + k) * d + l];
        let ga = |p: usize, q: usize, s: usize| gamma[(p * d + q) * d + s];
        let range: Vec<usize> = match scope {
            Scope::All => (0..d).collect(),
            Scope::Vertical => (n..d).collect(),
        };
        let mut worst: f64 = 0.0;
        for w in 0..d {
            for &i in &range {
                for &j in &range {
                    for &k in &range {
                        for l in 0..d {
                            let mut s = dr[w * d4 + ((i * d + j) * d + k) * d + l];
                            for m in 0..d {
                                s += ri(i, j, k, m) * ga(w, m, l)
                                    - ga(w, i, m) * ri(m, j, k, l)
                                    - ga(w, j, m) * ri(i, m, k, l)
                                    - ga(w, k, m) * ri(i, j, m, l);
                            }
                            worst = worst.max(if s.is_nan() { f64::INFINITY } else { s.abs() });
                        }
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Which rungs of the classification hold; gates the identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypotheses {
    pub k_paracontact: bool,
    pub para_sasakian: bool,
}

/// One identity of the suite.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremCheck {
    pub name: String,
    pub status: Status,
    pub residual: Residual,
}

/// Flag curvatures and Ricci entries at one sample point, in the
/// pseudo-orthonormal frames `(E_1, …, E_{2k}, ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTable {
    pub point: Point,
    /// `K(E_i^H, ξ^H)` for each horizontal frame member.
    pub flag_h: Vec<f64>,
    /// `K(E_a^V, ξ^V)`.
    pub flag_v: Vec<f64>,
    /// `S^H(E_i, E_j)` with `ξ^H` last.
    pub ricci_h: Vec<Vec<f64>>,
    pub ricci_v: Vec<Vec<f64>>,
}

impl CurvatureTable {
    /// The table at the point of `pg`, in its default pseudo-orthonormal
    /// frames.
    pub fn at(pg: &PointGeometry) -> Result<CurvatureTable> {
        let fh = pg.pseudo_orthonormal_frame(true, None)?;
        let fv = pg.pseudo_orthonormal_frame(false, None)?;
        CurvatureTable::from_frames(pg, &fh, &fv)
    }

    fn from_frames(pg: &PointGeometry, fh: &PseudoFrame, fv: &PseudoFrame) -> Result<CurvatureTable> {
        let ricci_matrix = |f: &PseudoFrame| -> Vec<Vec<f64>> {
            let all: Vec<&DVector<f64>> = f.with_xi().map(|(e, _)| e).collect();
            all.iter().map(|a| all.iter().map(|b| pg.ricci(f, a, b)).collect()).collect()
        };
        Ok(CurvatureTable {
            point: pg.point.clone(),
            flag_h: fh.fields.iter().map(|e| pg.flag_curvature(e, &pg.xi_h)).collect::<Result<_>>()?,
            flag_v: fv.fields.iter().map(|e| pg.flag_curvature(e, &pg.xi_v)).collect::<Result<_>>()?,
            ricci_h: ricci_matrix(fh),
            ricci_v: ricci_matrix(fv),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub checks: Vec<TheoremCheck>,
    pub tables: Vec<CurvatureTable>,
}

impl CurvatureReport {
    pub fn check(&self, name: &str) -> Option<&TheoremCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Max-abs tracker for numeric residuals.
struct Tracker(Residual);

impl Tracker {
    fn new(name: &str) -> Tracker {
        Tracker(Residual::zero(name))
    }

    fn see(&mut self, value: f64, p: &Point, labels: &[&str]) {
        let a = if value.is_nan() { f64::INFINITY } else { value.abs() };
        if a > self.0.value || self.0.witness.is_none() {
            self.0.value = a.max(self.0.value);
            self.0.witness = Some(Witness { point: p.clone(), fields: labels.iter().map(|s| s.to_string()).collect() });
        }
    }

    fn see_vec(&mut self, v: &DVector<f64>, p: &Point, labels: &[&str]) {
        self.see(v.amax(), p, labels);
    }
}

pub const LEMMA_V: &str = "R(X^V, xi^V)xi^V + 1/4 (X^V - eta^V(X) xi^V)";
pub const LEMMA_H: &str = "R(X^H, xi^H)xi^H + 1/4 (X^H - eta^H(X) xi^H) + D^V_[X^H, xi^H] xi^H";
pub const FLAG_V: &str = "K(X^V, xi^V) + 1/4";
pub const FLAG_H: &str = "K(X^H, xi^H) + 1/4 + G(D^V_[X^H, xi^H] xi^H, X^H)";
pub const FLAG_H_EQUIV: &str = "K(X^H, xi^H) = -1/4 iff G(D^V_[X^H, xi^H] xi^H, X^H) = 0";
pub const DPHI_H: &str = "(D_X^H phi)Y^H - 1/2 (eta^H(Y) X^H - G^H(X, Y) xi^H)";
pub const DPHI_V: &str = "(D_X^V phi)Y^V - 1/2 (eta^V(Y) X^V - G^V(X, Y) xi^V)";
pub const R_XI_V: &str = "R(X^V, Y^V)xi^V - 1/4 (eta^V(X) Y^V - eta^V(Y) X^V)";
pub const R_XI_H: &str = "R(X^H, Y^H)xi^H - 1/4 (eta^H(X) Y^H - eta^H(Y) X^H) + D^V_[X^H, Y^H] xi^H";
pub const PHI_FLAG_V: &str = "K(X^V, phi X^V) + 1/4 where the vertical curvature is parallel";
pub const RICCI_H_X: &str = "S^H(X^H, xi^H) + k1/2 eta^H(X) + sum eps_i G(D^V_[E_i, X] xi^H, E_i)";
pub const RICCI_V_X: &str = "S^V(X^V, xi^V) + k2/2 eta^V(X)";
pub const RICCI_H_XI: &str = "S^H(xi^H, xi^H) + k1/2 + sum eps_i G(D^V_[E_i, xi^H] xi^H, E_i)";
pub const RICCI_V_XI: &str = "S^V(xi^V, xi^V) + k2/2";
pub const RICCI_H_X_EQUIV: &str = "S^H(X^H, xi^H) = -k1/2 eta^H(X) iff sum eps_i G(D^V_[E_i, X] xi^H, E_i) = 0";
pub const RICCI_H_XI_EQUIV: &str = "S^H(xi^H, xi^H) = -k1/2 iff sum eps_i G(D^V_[E_i, xi^H] xi^H, E_i) = 0";
pub const K_RICCI_H_XI: &str = "K-paracontact: S^H(xi^H, xi^H) + k1/2 + sum eps_i G(D^V_[E_i, xi^H] xi^H, E_i)";
pub const K_RICCI_V_XI: &str = "K-paracontact: S^V(xi^V, xi^V) + k2/2";
pub const K_RICCI_H_XI_EQUIV: &str = "K-paracontact: S^H(xi^H, xi^H) = -k1/2 iff sum eps_i G(D^V_[E_i, xi^H] xi^H, E_i) = 0";

/// Every identity of [`theorem_suite`], in report order.
pub const SUITE: [&str; 19] = [
    LEMMA_V,
    LEMMA_H,
    FLAG_V,
    FLAG_H,
    FLAG_H_EQUIV,
    DPHI_H,
    DPHI_V,
    R_XI_V,
    R_XI_H,
    PHI_FLAG_V,
    RICCI_H_X,
    RICCI_V_X,
    RICCI_H_XI,
    RICCI_V_XI,
    RICCI_H_X_EQUIV,
    RICCI_H_XI_EQUIV,
    K_RICCI_H_XI,
    K_RICCI_V_XI,
    K_RICCI_H_XI_EQUIV,
];

/// Numeric test vectors at a point: the test fields evaluated there.
fn vectors_at(ctx: &Context, p: &Point) -> Result<Vec<(String, DVector<f64>)>> {
    ctx.fields.iter().map(|f| Ok((f.label.clone(), DVector::from_vec(f.field.eval(p).map_err(|e| Error::domain(e, p))?)))).collect()
}

/// Component orthogonal to `ξ` in one distribution, scaled to `|G| = 1`;
/// `None` when nearly null.
fn unit_orthogonal(pg: &PointGeometry, v: &DVector<f64>, horizontal: bool) -> Option<DVector<f64>> {
    let x = pg.project(v, horizontal);
    let xi = pg.xi(horizontal);
    let x = &x - xi * pg.eta(horizontal, &x);
    let nn = pg.g(&x, &x);
    (nn.abs() > 1e-6).then(|| x / nn.abs().sqrt())
}

/// Runs every identity whose hypotheses hold, at every sample point of
/// `ctx`, and collects the curvature tables. Identities with unmet
/// hypotheses are reported as such, never evaluated.
pub fn theorem_suite(s: &PacStructure, d: &FinslerConnection, ctx: &Context, hyp: Hypotheses) -> Result<CurvatureReport> {
    let geo = Geometry::new(s, d);
    let c = s.chart();
    let (k1, k2) = (c.k1 as f64, c.k2 as f64);
    let tol = ctx.tolerance;
    let mut t: std::collections::BTreeMap<&str, Tracker> = std::collections::BTreeMap::new();
    let names = [
        LEMMA_V,
        LEMMA_H,
        FLAG_V,
        FLAG_H,
        R_XI_V,
        R_XI_H,
        PHI_FLAG_V,
        RICCI_H_X,
        RICCI_V_X,
        RICCI_H_XI,
        RICCI_V_XI,
        K_RICCI_H_XI,
        K_RICCI_V_XI,
    ];
    for nm in names {
        t.insert(nm, Tracker::new(nm));
    }
    // equivalences: count disagreements
    let mut eq_flag = Tracker::new(FLAG_H_EQUIV);
    let mut eq_rx = Tracker::new(RICCI_H_X_EQUIV);
    let mut eq_rxi = Tracker::new(RICCI_H_XI_EQUIV);
    let mut eq_k_rxi = Tracker::new(K_RICCI_H_XI_EQUIV);
    let agree = |a: f64, b: f64| if (a.abs() < tol) == (b.abs() < tol) { 0.0 } else { 1.0 };

    let derivative = if hyp.para_sasakian { Some(CurvatureDerivative::new(d, &geo.curvature)) } else { None };
    let mut symmetric_points = 0usize;
    let mut tables = Vec::new();
    for p in &ctx.points {
        let pg = geo.at(p)?;
        let vecs = vectors_at(ctx, p)?;
        let fh = pg.pseudo_orthonormal_frame(true, None)?;
        let fv = pg.pseudo_orthonormal_frame(false, None)?;
        let (xh, xv) = (pg.xi_h.clone(), pg.xi_v.clone());

        tables.push(CurvatureTable::from_frames(&pg, &fh, &fv)?);

        let sh_xixi = pg.ricci(&fh, &xh, &xh);
        let sv_xixi = pg.ricci(&fv, &xv, &xv);
        let corr_xi = pg.ricci_correction(&fh, &xh);
        if hyp.k_paracontact {
            t.get_mut(K_RICCI_H_XI).unwrap().see(sh_xixi + k1 / 2.0 + corr_xi, p, &["xi^H"]);
            t.get_mut(K_RICCI_V_XI).unwrap().see(sv_xixi + k2 / 2.0, p, &["xi^V"]);
            eq_k_rxi.see(agree(sh_xixi + k1 / 2.0, corr_xi), p, &["xi^H"]);
        }
        if hyp.para_sasakian {
            t.get_mut(RICCI_H_XI).unwrap().see(sh_xixi + k1 / 2.0 + corr_xi, p, &["xi^H"]);
            t.get_mut(RICCI_V_XI).unwrap().see(sv_xixi + k2 / 2.0, p, &["xi^V"]);
            eq_rxi.see(agree(sh_xixi + k1 / 2.0, corr_xi), p, &["xi^H"]);
        }

        for (label, v) in &vecs {
            let (vh, vv) = (pg.project(v, true), pg.project(v, false));
            let l = [label.as_str()];
            if hyp.k_paracontact {
                let r = pg.riemann(&vv, &xv, &xv) + (&vv - &xv * pg.eta(false, &vv)) * 0.25;
                t.get_mut(LEMMA_V).unwrap().see_vec(&r, p, &l);
                let br = pg.bracket_correction(&vh, &xh);
                let r = pg.riemann(&vh, &xh, &xh) + (&vh - &xh * pg.eta(true, &vh)) * 0.25 + &br;
                t.get_mut(LEMMA_H).unwrap().see_vec(&r, p, &l);
                if let Some(u) = unit_orthogonal(&pg, v, false) {
                    t.get_mut(FLAG_V).unwrap().see(pg.flag_curvature(&u, &xv)? + 0.25, p, &l);
                }
                if let Some(u) = unit_orthogonal(&pg, v, true) {
                    let k = pg.flag_curvature(&u, &xh)?;
                    let scalar = pg.g(&pg.bracket_correction(&u, &xh), &u);
                    // the scalar enters with the sign of G(X, X)
                    let sgn = pg.g(&u, &u).signum();
                    t.get_mut(FLAG_H).unwrap().see(k + 0.25 + sgn * scalar, p, &l);
                    eq_flag.see(agree(k + 0.25, scalar), p, &l);
                }
            }
            if hyp.para_sasakian {
                let sh = pg.ricci(&fh, &vh, &xh);
                let corr = pg.ricci_correction(&fh, &vh);
                t.get_mut(RICCI_H_X).unwrap().see(sh + k1 / 2.0 * pg.eta(true, &vh) + corr, p, &l);
                eq_rx.see(agree(sh + k1 / 2.0 * pg.eta(true, &vh), corr), p, &l);
                let sv = pg.ricci(&fv, &vv, &xv);
                t.get_mut(RICCI_V_X).unwrap().see(sv + k2 / 2.0 * pg.eta(false, &vv), p, &l);
                for (label2, w) in &vecs {
                    let (wh, wv) = (pg.project(w, true), pg.project(w, false));
                    let l2 = [label.as_str(), label2.as_str()];
                    let r = pg.riemann(&vv, &wv, &xv) - (&wv * pg.eta(false, &vv) - &vv * pg.eta(false, &wv)) * 0.25;
                    t.get_mut(R_XI_V).unwrap().see_vec(&r, p, &l2);
                    let r = pg.riemann(&vh, &wh, &xh) - (&wh * pg.eta(true, &vh) - &vh * pg.eta(true, &wh)) * 0.25
                        + pg.bracket_correction(&vh, &wh);
                    t.get_mut(R_XI_H).unwrap().see_vec(&r, p, &l2);
                }
            }
        }

        if let Some(dr) = &derivative {
            if dr.local_symmetry_residual(p, Scope::Vertical)? < tol {
                symmetric_points += 1;
                for (label, v) in &vecs {
                    if let Some(u) = unit_orthogonal(&pg, v, false) {
                        let k = pg.vertical_phi_flag(&u)?;
                        t.get_mut(PHI_FLAG_V).unwrap().see(k + 0.25, p, &[label.as_str()]);
                    }
                }
            }
        }
    }

    let mut dphi = [Probe::new(DPHI_H), Probe::new(DPHI_V)];
    if hyp.para_sasakian {
        let g = &s.metric;
        for (i, j) in ctx.pairs(c.dim()) {
            let (x, y) = (&ctx.fields[i].field, &ctx.fields[j].field);
            let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str()];
            let (xh, yh) = (x.h_proj(), y.h_proj());
            let rhs = &xh.mul_fn(&s.eta_h(&yh)) - &s.xi_h().mul_fn(&g.apply_h(&xh, &yh));
            dphi[0].push_field(&(&cov_deriv_phi(d, s, &xh, &yh) - &rhs.scale(0.5)), &labels);
            let (xv, yv) = (x.v_proj(), y.v_proj());
            let rhs = &xv.mul_fn(&s.eta_v(&yv)) - &s.xi_v().mul_fn(&g.apply_v(&xv, &yv));
            dphi[1].push_field(&(&cov_deriv_phi(d, s, &xv, &yv) - &rhs.scale(0.5)), &labels);
        }
    }
    let [p0, p1] = dphi;
    let dphi_res = [p0.run(&ctx.points)?, p1.run(&ctx.points)?];

    let status = |holds: bool, r: &Residual| {
        if !holds {
            Status::HypothesisNotMet
        } else if r.passes(tol) {
            Status::Pass
        } else {
            Status::Fail
        }
    };
    let mut checks = Vec::new();
    let mut push = |name: &str, holds: bool, r: Residual| {
        let r = if holds { r } else { Residual::zero(name) };
        checks.push(TheoremCheck { name: name.to_string(), status: status(holds, &r), residual: r });
    };
    let kp = hyp.k_paracontact;
    let ps = hyp.para_sasakian;
    let mut take = |n: &str| t.remove(n).unwrap().0;
    push(LEMMA_V, kp, take(LEMMA_V));
    push(LEMMA_H, kp, take(LEMMA_H));
    push(FLAG_V, kp, take(FLAG_V));
    push(FLAG_H, kp, take(FLAG_H));
    push(FLAG_H_EQUIV, kp, eq_flag.0);
    let [r0, r1] = dphi_res;
    push(DPHI_H, ps, r0);
    push(DPHI_V, ps, r1);
    push(R_XI_V, ps, take(R_XI_V));
    push(R_XI_H, ps, take(R_XI_H));
    push(PHI_FLAG_V, ps && symmetric_points > 0, take(PHI_FLAG_V));
    push(RICCI_H_X, ps, take(RICCI_H_X));
    push(RICCI_V_X, ps, take(RICCI_V_X));
    push(RICCI_H_XI, ps, take(RICCI_H_XI));
    push(RICCI_V_XI, ps, take(RICCI_V_XI));
    push(RICCI_H_X_EQUIV, ps, eq_rx.0);
    push(RICCI_H_XI_EQUIV, ps, eq_rxi.0);
    push(K_RICCI_H_XI, kp, take(K_RICCI_H_XI));
    push(K_RICCI_V_XI, kp, take(K_RICCI_V_XI));
    push(K_RICCI_H_XI_EQUIV, kp, eq_k_rxi.0);
    Ok(CurvatureReport { checks, tables })
}
