//! The canonical metrical d-connection, covariant derivatives, torsion and
//! the connection-level characterisations of paracontact structures.
//!
//! In the adapted frame `(e_0..e_{n+m-1}) = (δ_1..δ_n, ∂_{y1}..∂_{ym})` the
//! connection is stored as four blocks,
//!
//! ```text
//! D_{δ_i} δ_j = F_ij^k δ_k      D_{δ_i} ∂_b = F̄_ib^c ∂_c
//! D_{∂_a} δ_j = C_aj^k δ_k      D_{∂_a} ∂_b = C̄_ab^c ∂_c
//! ```
//!
//! with
//!
//! ```text
//! F_ij^k = ½ g^kl (δ_i g_jl + δ_j g_il − δ_l g_ij)
//! C̄_ab^c = ½ h^cd (∂_a h_bd + ∂_b h_ad − ∂_d h_ab)
//! F̄_ib^c = ∂_b N_i^c + ½ h^cd (δ_i h_bd − h_ed ∂_b N_i^e − h_be ∂_d N_i^e)
//! C_aj^k = ½ g^kl ∂_a g_jl
//! ```
//!
//! All coefficients are expressions (the inverse blocks come from the
//! adjugate), so curvature can differentiate them again.

use crate::bundle::{Bundle, Chart, Point, VecField};
use crate::calculus;
use crate::dtensor::{d_twoform, BilinearForm, Metric};
use crate::error::Result;
use crate::expr::Expr;
use crate::sample::TestField;
use crate::structure::{self, require, PacStructure};
use crate::verify::{CheckReport, Context, Probe};

type Table = Vec<Vec<Vec<Expr>>>;

/// Coefficient blocks of a d-connection: `f[i][j][k] = F_ij^k`,
/// `fbar[i][b][c] = F̄_ib^c`, `c[a][j][k] = C_aj^k`, `cbar[a][b][c] = C̄_ab^c`.
#[derive(Clone, Debug)]
pub struct FinslerConnection {
    pub bundle: Bundle,
    pub f: Table,
    pub fbar: Table,
    pub c: Table,
    pub cbar: Table,
}

fn table(a: usize, b: usize, c: usize) -> Table {
    vec![vec![vec![Expr::zero(); c]; b]; a]
}

/// `e_k(f)` for every adapted frame field `e_k` and every entry of `m`:
/// `out[k][i][j] = e_k(m[i][j])`.
fn frame_derivatives(b: &Bundle, m: &[Vec<Expr>]) -> Table {
    let c = &b.chart;
    let cols = m.first().map_or(1, |r| r.len().max(1));
    let flat: Vec<Expr> = m.iter().flatten().cloned().collect();
    (0..c.dim())
        .map(|e| {
            let d = b.apply_all(&VecField::frame(c, e), &flat);
            d.chunks(cols).map(|r| r.to_vec()).collect()
        })
        .collect()
}

/// The canonical connection of `g` over `b`. Fails with a singular-block
/// error if a metric block degenerates at one of `points`.
pub fn canonical_connection(b: &Bundle, g: &Metric, points: &[Point]) -> Result<FinslerConnection> {
    g.validate(points)?;
    Ok(canonical_connection_unchecked(b, g))
}

pub(crate) fn canonical_connection_unchecked(b: &Bundle, g: &Metric) -> FinslerConnection {
    let c = b.chart;
    let (n, m) = (c.n(), c.m());
    let (gi, hi) = g.inverse_symbolic();
    let dg = frame_derivatives(b, &g.g);
    let dh = frame_derivatives(b, &g.h);
    let dn = frame_derivatives(b, b.connection.coeffs());
    let half = |e: Expr| e.scale(0.5);

    let mut f = table(n, n, n);
    for i in 0..n {
        for j in 0..n {
            let low: Vec<Expr> = (0..n).map(|l| &dg[i][j][l] + &dg[j][i][l] - &dg[l][i][j]).collect();
            for k in 0..n {
                f[i][j][k] = half(Expr::sum((0..n).map(|l| &gi[k][l] * &low[l])));
            }
        }
    }
    let mut cbar = table(m, m, m);
    for a in 0..m {
        for bb in 0..m {
            let low: Vec<Expr> = (0..m).map(|d| &dh[n + a][bb][d] + &dh[n + bb][a][d] - &dh[n + d][a][bb]).collect();
            for cc in 0..m {
                cbar[a][bb][cc] = half(Expr::sum((0..m).map(|d| &hi[cc][d] * &low[d])));
            }
        }
    }
    let mut fbar = table(n, m, m);
    for i in 0..n {
        for bb in 0..m {
            // dn[n + b][i][e] = ∂_b N_i^e
            let low: Vec<Expr> = (0..m)
                .map(|d| {
                    let s1 = Expr::sum((0..m).map(|e| &g.h[e][d] * &dn[n + bb][i][e]));
                    let s2 = Expr::sum((0..m).map(|e| &g.h[bb][e] * &dn[n + d][i][e]));
                    &dh[i][bb][d] - s1 - s2
                })
                .collect();
            for cc in 0..m {
                let sol = half(Expr::sum((0..m).map(|d| &hi[cc][d] * &low[d])));
                fbar[i][bb][cc] = &dn[n + bb][i][cc] + sol;
            }
        }
    }
    let mut cc_tab = table(m, n, n);
    for a in 0..m {
        for j in 0..n {
            for k in 0..n {
                cc_tab[a][j][k] = half(Expr::sum((0..n).map(|l| &gi[k][l] * &dg[n + a][j][l])));
            }
        }
    }
    FinslerConnection { bundle: b.clone(), f, fbar, c: cc_tab, cbar }
}

impl FinslerConnection {
    pub fn chart(&self) -> Chart {
        self.bundle.chart
    }

    /// `Γ_p^q_r` in the flat adapted index: `D_{e_p} e_q = Σ_r Γ_pq^r e_r`.
    /// Entries that mix horizontal and vertical `q, r` are zero.
    pub fn gamma(&self, p: usize, q: usize, r: usize) -> Expr {
        let n = self.chart().n();
        match (p < n, q < n, r < n) {
            (true, true, true) => self.f[p][q][r].clone(),
            (true, false, false) => self.fbar[p][q - n][r - n].clone(),
            (false, true, true) => self.c[p - n][q][r].clone(),
            (false, false, false) => self.cbar[p - n][q - n][r - n].clone(),
            _ => Expr::zero(),
        }
    }

    /// The full table `Γ[p][q][r]`.
    pub fn gamma_table(&self) -> Table {
        let d = self.chart().dim();
        (0..d).map(|p| (0..d).map(|q| (0..d).map(|r| self.gamma(p, q, r)).collect()).collect()).collect()
    }

    /// The flat connection with every coefficient zero.
    pub fn zero(b: &Bundle) -> FinslerConnection {
        let c = b.chart;
        let (n, m) = (c.n(), c.m());
        FinslerConnection { bundle: b.clone(), f: table(n, n, n), fbar: table(n, m, m), c: table(m, n, n), cbar: table(m, m, m) }
    }
}

/// `D_X Y`, with `h`-part `X(Y^k) + X^i Y^j F_ij^k + X̄^a Y^j C_aj^k` and
/// `v`-part `X(Ȳ^c) + X^i Ȳ^b F̄_ib^c + X̄^a Ȳ^b C̄_ab^c`.
pub fn cov_deriv(d: &FinslerConnection, x: &VecField, y: &VecField) -> VecField {
    let (n, m) = (d.chart().n(), d.chart().m());
    let dyh = d.bundle.apply_all(x, &y.h);
    let dyv = d.bundle.apply_all(x, &y.v);
    let h = (0..n)
        .map(|k| {
            let a = Expr::sum((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| &x.h[i] * &y.h[j] * &d.f[i][j][k]));
            let b = Expr::sum((0..m).flat_map(|a| (0..n).map(move |j| (a, j))).map(|(a, j)| &x.v[a] * &y.h[j] * &d.c[a][j][k]));
            &dyh[k] + a + b
        })
        .collect();
    let v = (0..m)
        .map(|c| {
            let a = Expr::sum((0..n).flat_map(|i| (0..m).map(move |b| (i, b))).map(|(i, b)| &x.h[i] * &y.v[b] * &d.fbar[i][b][c]));
            let b = Expr::sum((0..m).flat_map(|a| (0..m).map(move |b| (a, b))).map(|(a, b)| &x.v[a] * &y.v[b] * &d.cbar[a][b][c]));
            &dyv[c] + a + b
        })
        .collect();
    VecField::new(h, v)
}

/// `(D_X φ)Y = D_X(φY) − φ(D_X Y)`.
pub fn cov_deriv_phi(d: &FinslerConnection, s: &PacStructure, x: &VecField, y: &VecField) -> VecField {
    &cov_deriv(d, x, &s.phi(y)) - &s.phi(&cov_deriv(d, x, y))
}

/// The five torsion blocks.
#[derive(Clone, Debug)]
pub struct TorsionBlocks {
    /// `T^H(X^H, Y^H) = D_{X^H} Y^H − D_{Y^H} X^H − [X^H, Y^H]^H`
    pub hh: VecField,
    /// `T^V(X^H, Y^H) = −[X^H, Y^H]^V`
    pub vh: VecField,
    /// `T^H(X^H, Y^V) = −D_{Y^V} X^H − [X^H, Y^V]^H`
    pub hhv: VecField,
    /// `T^V(X^H, Y^V) = D_{X^H} Y^V − [X^H, Y^V]^V`
    pub vhv: VecField,
    /// `T^V(X^V, Y^V) = D_{X^V} Y^V − D_{Y^V} X^V − [X^V, Y^V]^V`
    pub vv: VecField,
}

pub fn torsion_blocks(d: &FinslerConnection, x: &VecField, y: &VecField) -> TorsionBlocks {
    let b = &d.bundle;
    let (xh, xv, yh, yv) = (x.h_proj(), x.v_proj(), y.h_proj(), y.v_proj());
    let br_hh = b.bracket(&xh, &yh);
    let br_hv = b.bracket(&xh, &yv);
    TorsionBlocks {
        hh: &(&cov_deriv(d, &xh, &yh) - &cov_deriv(d, &yh, &xh)) - &br_hh.h_proj(),
        vh: -br_hh.v_proj(),
        hhv: &(-cov_deriv(d, &yv, &xh)) - &br_hv.h_proj(),
        vhv: &cov_deriv(d, &xh, &yv) - &br_hv.v_proj(),
        vv: &(&cov_deriv(d, &xv, &yv) - &cov_deriv(d, &yv, &xv)) - &b.bracket(&xv, &yv).v_proj(),
    }
}

/// Ordered argument triples: every triple of frame fields, plus each
/// remaining field with its two successors.
pub(crate) fn triples(fields: &[TestField], frame: usize) -> Vec<(usize, usize, usize)> {
    let k = fields.len();
    let mut out = Vec::new();
    for i in 0..frame.min(k) {
        for j in 0..frame.min(k) {
            for l in 0..frame.min(k) {
                out.push((i, j, l));
            }
        }
    }
    for i in frame..k {
        out.push((i, (i + 1) % k, (i + 2) % k));
    }
    out
}

fn proj(x: &VecField, horizontal: bool) -> VecField {
    if horizontal {
        x.h_proj()
    } else {
        x.v_proj()
    }
}

fn tag(horizontal: bool) -> &'static str {
    if horizontal {
        "H"
    } else {
        "V"
    }
}

/// `X(G(Y, Z)) − G(D_X Y, Z) − G(Y, D_X Z)` with each of `X, Y, Z`
/// projected horizontally or vertically and `G` replaced by `G^H` or
/// `G^V`: sixteen clauses.
pub fn check_metricity(d: &FinslerConnection, g: &Metric, ctx: &Context) -> Result<CheckReport> {
    let b = &d.bundle;
    let mut clauses = Vec::new();
    let trip = triples(&ctx.fields, d.chart().dim());
    for block in [true, false] {
        let form = |u: &VecField, v: &VecField| if block { g.apply_h(u, v) } else { g.apply_v(u, v) };
        for xt in [true, false] {
            for yt in [true, false] {
                for zt in [true, false] {
                    let mut p = Probe::new(format!("(D_X G^{})(Y, Z), X^{} Y^{} Z^{}", tag(block), tag(xt), tag(yt), tag(zt)));
                    for &(i, j, l) in &trip {
                        let (x, y, z) = (proj(&ctx.fields[i].field, xt), proj(&ctx.fields[j].field, yt), proj(&ctx.fields[l].field, zt));
                        let e = b.apply(&x, &form(&y, &z)) - form(&cov_deriv(d, &x, &y), &z) - form(&y, &cov_deriv(d, &x, &z));
                        p.push(e, &[&ctx.fields[i].label, &ctx.fields[j].label, &ctx.fields[l].label]);
                    }
                    clauses.push(p.run(&ctx.points)?);
                }
            }
        }
    }
    Ok(CheckReport::new("metricity", clauses))
}

/// The (h)h- and (v)v-torsion over the test-field pairs.
pub fn check_symmetry(d: &FinslerConnection, ctx: &Context) -> Result<CheckReport> {
    let mut hh = Probe::new("(h)h-torsion");
    let mut vv = Probe::new("(v)v-torsion");
    for (i, j) in ctx.pairs(d.chart().dim()) {
        let t = torsion_blocks(d, &ctx.fields[i].field, &ctx.fields[j].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str()];
        hh.push_field(&t.hh, &labels);
        vv.push_field(&t.vv, &labels);
    }
    Ok(CheckReport::new("symmetry", vec![hh.run(&ctx.points)?, vv.run(&ctx.points)?]))
}

/// `X G(Y, Z) + Y G(X, Z) − Z G(X, Y) + G([X, Y], Z) − G([X, Z], Y) − G([Y, Z], X)`,
/// evaluated on one block's projections.
pub fn koszul_rhs(b: &Bundle, g: &dyn BilinearForm, x: &VecField, y: &VecField, z: &VecField) -> Expr {
    b.apply(x, &g.apply(y, z)) + b.apply(y, &g.apply(x, z)) - b.apply(z, &g.apply(x, y)) + g.apply(&b.bracket(x, y), z)
        - g.apply(&b.bracket(x, z), y)
        - g.apply(&b.bracket(y, z), x)
}

/// `2G(D_{X^H} Y^H, Z^H)` against the six-term Koszul expression, and the
/// vertical analogue.
pub fn check_koszul(d: &FinslerConnection, g: &Metric, ctx: &Context) -> Result<CheckReport> {
    let b = &d.bundle;
    let gh = |u: &VecField, v: &VecField| g.apply_h(u, v);
    let gv = |u: &VecField, v: &VecField| g.apply_v(u, v);
    let mut ph = Probe::new("horizontal Koszul formula");
    let mut pv = Probe::new("vertical Koszul formula");
    for (i, j, l) in triples(&ctx.fields, d.chart().dim()) {
        let (x, y, z) = (&ctx.fields[i].field, &ctx.fields[j].field, &ctx.fields[l].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str(), ctx.fields[l].label.as_str()];
        let (xh, yh, zh) = (x.h_proj(), y.h_proj(), z.h_proj());
        ph.push(gh(&cov_deriv(d, &xh, &yh), &zh).scale(2.0) - koszul_rhs(b, &gh, &xh, &yh, &zh), &labels);
        let (xv, yv, zv) = (x.v_proj(), y.v_proj(), z.v_proj());
        pv.push(gv(&cov_deriv(d, &xv, &yv), &zv).scale(2.0) - koszul_rhs(b, &gv, &xv, &yv, &zv), &labels);
    }
    Ok(CheckReport::new("Koszul", vec![ph.run(&ctx.points)?, pv.run(&ctx.points)?]))
}

/// The K-paracontact criterion: residuals of
/// (i) `D_{X^H} ξ^H + ½ φX^H`, (ii) `G^H([ξ^H, X^V]^H, Y^H)`,
/// (iii) `D_{X^V} ξ^V + ½ φX^V`, (iv) `G^V([ξ^V, X^H]^V, Y^V)`,
/// plus `2G(D_{X^H} ξ^H, Y^H) − dη(X^H, Y^H)`.
pub fn check_k_paracontact_criterion(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    require(&structure::check_paracontact_metric(s, ctx)?, "K-paracontact criterion", ctx.tolerance)?;
    k_paracontact_criterion_unchecked(d, s, ctx)
}

pub(crate) fn k_paracontact_criterion_unchecked(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let b = &s.bundle;
    let g = &s.metric;
    let (zh, zv) = (s.xi_h(), s.xi_v());
    let mut p1 = Probe::new("D_{X^H} xi^H + 1/2 phi X^H");
    let mut p3 = Probe::new("D_{X^V} xi^V + 1/2 phi X^V");
    for f in &ctx.fields {
        let (xh, xv) = (f.field.h_proj(), f.field.v_proj());
        p1.push_field(&(&cov_deriv(d, &xh, &zh) + &s.phi(&xh).scale(0.5)), &[&f.label]);
        p3.push_field(&(&cov_deriv(d, &xv, &zv) + &s.phi(&xv).scale(0.5)), &[&f.label]);
    }
    let mut p2 = Probe::new("G^H([xi^H, X^V]^H, Y^H)");
    let mut p4 = Probe::new("G^V([xi^V, X^H]^V, Y^V)");
    let mut chain = Probe::new("2 G(D_{X^H} xi^H, Y^H) - d eta(X^H, Y^H)");
    for (i, j) in ctx.pairs(s.chart().dim()) {
        let (x, y) = (&ctx.fields[i].field, &ctx.fields[j].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str()];
        p2.push(g.apply_h(&b.bracket(&zh, &x.v_proj()), y), &labels);
        p4.push(g.apply_v(&b.bracket(&zv, &x.h_proj()), y), &labels);
        let (xh, yh) = (x.h_proj(), y.h_proj());
        chain.push(g.apply_h(&cov_deriv(d, &xh, &zh), &yh).scale(2.0) - s.d_eta_h(&xh, &yh), &labels);
    }
    Ok(CheckReport::new(
        "K-paracontact criterion",
        vec![p1.run(&ctx.points)?, p2.run(&ctx.points)?, p3.run(&ctx.points)?, p4.run(&ctx.points)?, chain.run(&ctx.points)?],
    ))
}

/// `D_{ξ^H} φ` and `D_{ξ^V} φ` applied to the test fields.
pub fn phi_along_reeb(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let mut ph = Probe::new("(D_{xi^H} phi) X");
    let mut pv = Probe::new("(D_{xi^V} phi) X");
    for f in &ctx.fields {
        ph.push_field(&cov_deriv_phi(d, s, &s.xi_h(), &f.field), &[&f.label]);
        pv.push_field(&cov_deriv_phi(d, s, &s.xi_v(), &f.field), &[&f.label]);
    }
    Ok(CheckReport::new("D_xi phi", vec![ph.run(&ctx.points)?, pv.run(&ctx.points)?]))
}

/// Both sides of the identity expressing `2G((D_X φ)Y, Z)` through `dΦ`,
/// `N⁽¹⁾`, `N⁽²⁾` and `dη`, with all arguments in one distribution:
///
/// ```text
/// 2G((D_X φ)Y, Z) = −dΦ(X, φY, φZ) − dΦ(X, Y, Z) − G(N⁽¹⁾(Y, Z), φX)
///                   + N⁽²⁾(Y, Z) η(X) + dη(φY, X) η(Z) − dη(φZ, X) η(Y)
/// ```
///
/// Returns `(left, right)`; `horizontal` selects `X^H, Y^H, Z^H` with
/// `η^H`, otherwise the vertical version with `η^V`.
pub fn phi_derivative_identity(
    d: &FinslerConnection,
    s: &PacStructure,
    x: &VecField,
    y: &VecField,
    z: &VecField,
    horizontal: bool,
) -> (Expr, Expr) {
    let b = &s.bundle;
    let g = &s.metric;
    let (x, y, z) = (proj(x, horizontal), proj(y, horizontal), proj(z, horizontal));
    let big_phi = s.fundamental_form();
    let eta = |u: &VecField| if horizontal { s.eta_h(u) } else { s.eta_v(u) };
    let deta = |u: &VecField, v: &VecField| if horizontal { s.d_eta_h(u, v) } else { s.d_eta_v(u, v) };
    let (px, py, pz) = (s.phi(&x), s.phi(&y), s.phi(&z));
    let lhs = g.apply(&cov_deriv_phi(d, s, &x, &y), &z).scale(2.0);
    let n2 = calculus::n2(s, &y, &z)[if horizontal { 0 } else { 1 }].clone();
    let rhs = -d_twoform(b, &big_phi, &x, &py, &pz) - d_twoform(b, &big_phi, &x, &y, &z) - g.apply(&calculus::n1(s, &y, &z), &px)
        + n2 * eta(&x)
        + deta(&py, &x) * eta(&z)
        - deta(&pz, &x) * eta(&y);
    (lhs, rhs)
}

/// The paracontact-metric form of [`phi_derivative_identity`], where
/// `dΦ = 0` and `N⁽²⁾ = 0` leave
/// `2G((D_X φ)Y, Z) = −G(N⁽¹⁾(Y, Z), φX) + dη(φY, X) η(Z) − dη(φZ, X) η(Y)`.
pub fn paracontact_phi_derivative_identity(
    d: &FinslerConnection,
    s: &PacStructure,
    x: &VecField,
    y: &VecField,
    z: &VecField,
    horizontal: bool,
) -> (Expr, Expr) {
    let g = &s.metric;
    let (x, y, z) = (proj(x, horizontal), proj(y, horizontal), proj(z, horizontal));
    let eta = |u: &VecField| if horizontal { s.eta_h(u) } else { s.eta_v(u) };
    let deta = |u: &VecField, v: &VecField| if horizontal { s.d_eta_h(u, v) } else { s.d_eta_v(u, v) };
    let (px, py, pz) = (s.phi(&x), s.phi(&y), s.phi(&z));
    let lhs = g.apply(&cov_deriv_phi(d, s, &x, &y), &z).scale(2.0);
    let rhs = -g.apply(&calculus::n1(s, &y, &z), &px) + deta(&py, &x) * eta(&z) - deta(&pz, &x) * eta(&y);
    (lhs, rhs)
}

/// Residuals of [`paracontact_phi_derivative_identity`] and of `D_ξ φ`.
pub fn check_paracontact_phi_derivative(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    require(&structure::check_paracontact_metric(s, ctx)?, "paracontact phi derivative", ctx.tolerance)?;
    paracontact_phi_derivative_unchecked(d, s, ctx)
}

pub(crate) fn paracontact_phi_derivative_unchecked(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let mut ph = Probe::new("2G((D_X phi)Y, Z) paracontact identity, horizontal");
    let mut pv = Probe::new("2G((D_X phi)Y, Z) paracontact identity, vertical");
    for (i, j, l) in triples(&ctx.fields, s.chart().dim()) {
        let (x, y, z) = (&ctx.fields[i].field, &ctx.fields[j].field, &ctx.fields[l].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str(), ctx.fields[l].label.as_str()];
        let (a, b) = paracontact_phi_derivative_identity(d, s, x, y, z, true);
        ph.push(a - b, &labels);
        let (a, b) = paracontact_phi_derivative_identity(d, s, x, y, z, false);
        pv.push(a - b, &labels);
    }
    let mut clauses = vec![ph.run(&ctx.points)?, pv.run(&ctx.points)?];
    clauses.extend(phi_along_reeb(d, s, ctx)?.clauses);
    Ok(CheckReport::new("paracontact phi derivative", clauses))
}

/// Residuals of [`phi_derivative_identity`] in both distributions.
pub fn check_phi_derivative_identity(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    require(&structure::check_compatibility(s, ctx)?, "phi derivative identity", ctx.tolerance)?;
    phi_derivative_unchecked(d, s, ctx)
}

pub(crate) fn phi_derivative_unchecked(d: &FinslerConnection, s: &PacStructure, ctx: &Context) -> Result<CheckReport> {
    let mut ph = Probe::new("2G((D_X phi)Y, Z) identity, horizontal");
    let mut pv = Probe::new("2G((D_X phi)Y, Z) identity, vertical");
    for (i, j, l) in triples(&ctx.fields, s.chart().dim()) {
        let (x, y, z) = (&ctx.fields[i].field, &ctx.fields[j].field, &ctx.fields[l].field);
        let labels = [ctx.fields[i].label.as_str(), ctx.fields[j].label.as_str(), ctx.fields[l].label.as_str()];
        let (a, b) = phi_derivative_identity(d, s, x, y, z, true);
        ph.push(a - b, &labels);
        let (a, b) = phi_derivative_identity(d, s, x, y, z, false);
        pv.push(a - b, &labels);
    }
    Ok(CheckReport::new("phi derivative identity", vec![ph.run(&ctx.points)?, pv.run(&ctx.points)?]))
}
