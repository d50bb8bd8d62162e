//! Helpers shared by the integration tests: contexts, random data and the
//! numeric oracles that never touch the symbolic engine.

#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pacfin::bundle::{Bundle, Chart, NonlinearConnection, Point};
use pacfin::dtensor::Metric;
use pacfin::expr::{parse, Expr};
use pacfin::sample::{random_polynomial, sample_points, spanning_fields, SampleBox};
use pacfin::verify::Context;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn chart() -> Chart {
    Chart::new(1, 1)
}

pub fn points(c: &Chart, count: usize, seed: u64) -> Vec<Point> {
    sample_points(&SampleBox::uniform(c, -0.5, 0.5), count, seed)
}

pub fn context(c: &Chart, count: usize, seed: u64, tol: f64) -> Context {
    Context::new(points(c, count, seed), spanning_fields(c, 3, seed), tol)
}

pub fn ex(s: &str, c: &Chart) -> Expr {
    parse(s, c).unwrap().simplify()
}

/// `f` at `p` with the flat coordinate `k` shifted by `t`.
pub fn shifted(p: &Point, k: usize, t: f64) -> Point {
    let mut q = p.clone();
    if k < q.x.len() {
        q.x[k] += t;
    } else {
        q.y[k - p.x.len()] += t;
    }
    q
}

/// Five-point central difference of a vector-valued numeric function in
/// flat coordinate `k`; exact for polynomials of degree ≤ 4 up to rounding.
pub fn fd<F: Fn(&Point) -> Vec<f64>>(f: &F, p: &Point, k: usize, h: f64) -> Vec<f64> {
    let a = f(&shifted(p, k, -2.0 * h));
    let b = f(&shifted(p, k, -h));
    let c = f(&shifted(p, k, h));
    let d = f(&shifted(p, k, 2.0 * h));
    (0..a.len()).map(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h)).collect()
}

/// A random polynomial nonlinear connection of degree 2.
pub fn random_connection(c: &Chart, seed: u64) -> NonlinearConnection {
    let mut r = rng(seed);
    let coeffs = (0..c.n()).map(|_| (0..c.m()).map(|_| random_polynomial(c, 2, 3, &mut r).scale(0.5)).collect()).collect();
    NonlinearConnection::new(c, coeffs)
}

/// A symmetric block `diag(1, −1, …, 1) + ε P` with `P` a random symmetric
/// polynomial matrix; nonsingular on the unit box for small `ε`.
pub fn random_block(c: &Chart, k: usize, eps: f64, r: &mut ChaCha8Rng) -> Vec<Vec<Expr>> {
    let mut m = vec![vec![Expr::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let base = if i == j {
                if i % 2 == 1 && i + 1 < k {
                    -1.0
                } else {
                    1.0
                }
            } else {
                0.0
            };
            let e = Expr::constant(base) + random_polynomial(c, 2, 3, r).scale(eps);
            m[i][j] = e.clone();
            m[j][i] = e;
        }
    }
    m
}

/// A random Finsler-type metric (blocks depending on `x` and `y`) over a
/// random nonlinear connection.
pub fn random_metric_bundle(seed: u64) -> (Bundle, Metric) {
    let c = chart();
    let mut r = rng(seed ^ 0x5eed);
    let g = random_block(&c, c.n(), 0.15, &mut r);
    let h = random_block(&c, c.m(), 0.15, &mut r);
    (Bundle::new(c, random_connection(&c, seed)), Metric::new(g, h))
}

/// Numeric metric block at a point.
pub fn block_at(b: &[Vec<Expr>], p: &Point) -> DMatrix<f64> {
    let k = b.len();
    DMatrix::from_fn(k, k, |i, j| b[i][j].eval(p).unwrap())
}

/// Classical Christoffel symbols `Γ^k_ij` of a block depending on the
/// base coordinates only, from finite differences and an LU inverse.
/// Indexed `[i][j][k]`.
pub fn classical_christoffel(g: &[Vec<Expr>], p: &Point) -> Vec<Vec<Vec<f64>>> {
    let n = g.len();
    let flat = |q: &Point| -> Vec<f64> { block_at(g, q).iter().copied().collect() };
    // column-major n×n
    let dg: Vec<Vec<f64>> = (0..n).map(|l| fd(&flat, p, l, 1e-3)).collect();
    let d = |l: usize, i: usize, j: usize| dg[l][i + j * n];
    let inv = block_at(g, p).lu().try_inverse().unwrap();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| (0..n).map(|l| 0.5 * inv[(k, l)] * (d(i, j, l) + d(j, i, l) - d(l, i, j))).sum()).collect())
                .collect()
        })
        .collect()
}

/// Classical `R^l_{kij}` from the Christoffel oracle, stored so that
/// `R(∂_i, ∂_j)∂_k = out[i][j][k][l] ∂_l`.
pub fn classical_riemann(g: &[Vec<Expr>], p: &Point) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = g.len();
    let gamma_flat = |q: &Point| -> Vec<f64> { classical_christoffel(g, q).into_iter().flatten().flatten().collect() };
    let dgam: Vec<Vec<f64>> = (0..n).map(|w| fd(&gamma_flat, p, w, 1e-2)).collect();
    let gam = classical_christoffel(g, p);
    let dg = |w: usize, i: usize, j: usize, k: usize| dgam[w][(i * n + j) * n + k];
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            (0..n)
                                .map(|l| {
                                    let mut v = dg(i, j, k, l) - dg(j, i, k, l);
                                    for m in 0..n {
                                        v += gam[j][k][m] * gam[i][m][l] - gam[i][k][m] * gam[j][m][l];
                                    }
                                    v
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// A random vector with entries in `[-1, 1]`.
pub fn random_vector(dim: usize, r: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| r.random_range(-1.0..1.0))
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b.abs()) })
}

/// A random expression built around polynomials of degree ≤ 4: the bare
/// polynomial, a product or quotient of two, or one inside `sin`, `cos`,
/// `exp`, `sinh`, `cosh` or `sqrt`.
pub fn random_expression(c: &Chart, r: &mut ChaCha8Rng) -> Expr {
    let p = random_polynomial(c, 4, 4, r);
    let q = random_polynomial(c, 4, 3, r);
    match r.random_range(0..8) {
        0 => p,
        1 => p * q,
        2 => p / (Expr::constant(2.0) + q.powi(2)),
        3 => p.scale(0.5).sin() + q,
        4 => p.scale(0.5).cos() * q,
        5 => p.scale(0.3).exp() - q,
        6 => p.scale(0.3).sinh() + q.scale(0.3).cosh(),
        _ => (Expr::constant(1.5) + p.powi(2)).sqrt(),
    }
}
