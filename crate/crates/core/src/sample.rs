//! Seeded sample points and test fields.
//!
//! All randomness goes through ChaCha8 seeded from a `u64`, so every point
//! and every random test field is reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{Chart, Point, VecField};
use crate::expr::Expr;

/// Name of the generator echoed in reports.
pub const GENERATOR: &str = "ChaCha8";

/// Per-variable sampling intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub x: Vec<(f64, f64)>,
    pub y: Vec<(f64, f64)>,
}

impl SampleBox {
    /// The box `[lo, hi]` in every variable.
    pub fn uniform(chart: &Chart, lo: f64, hi: f64) -> SampleBox {
        SampleBox { x: vec![(lo, hi); chart.n()], y: vec![(lo, hi); chart.m()] }
    }
}

/// `count` points drawn uniformly from `bx`.
pub fn sample_points(bx: &SampleBox, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |&(lo, hi): &(f64, f64)| if lo == hi { lo } else { rng.random_range(lo..hi) };
    (0..count)
        .map(|_| {
            let x = bx.x.iter().map(&mut draw).collect();
            let y = bx.y.iter().map(&mut draw).collect();
            Point::new(x, y)
        })
        .collect()
}

/// A random polynomial of total degree at most `degree` with `terms`
/// monomials and coefficients in `[-1, 1]`.
pub fn random_polynomial(chart: &Chart, degree: u32, terms: usize, rng: &mut impl Rng) -> Expr {
    let vars = chart.dim();
    Expr::sum((0..terms).map(|_| {
        let coeff = rng.random_range(-1.0..1.0);
        let deg = rng.random_range(0..=degree);
        let mut exps = vec![0u32; vars];
        for _ in 0..deg {
            exps[rng.random_range(0..vars)] += 1;
        }
        exps.iter().enumerate().fold(Expr::constant(coeff), |acc, (k, &e)| acc * Expr::var(chart.var(k)).powi(e))
    }))
}

/// A field whose every adapted component is a random polynomial.
pub fn random_field(chart: &Chart, degree: u32, rng: &mut impl Rng) -> VecField {
    let comps = (0..chart.dim()).map(|_| random_polynomial(chart, degree, 3, rng)).collect();
    VecField::from_flat(chart, comps)
}

/// A labelled vector field used as a test argument.
#[derive(Clone, Debug)]
pub struct TestField {
    pub label: String,
    pub field: VecField,
}

pub(crate) fn frame_label(chart: &Chart, k: usize) -> String {
    if k < chart.n() {
        format!("d/dx{}", k + 1)
    } else {
        format!("d/dy{}", k - chart.n() + 1)
    }
}

/// The spanning test-field set: the adapted frame, the adapted frame
/// scaled by `1 + u_k^2/2` (non-constant multiples expose missing
/// derivative terms), and `random` seeded polynomial fields of degree 2.
pub fn spanning_fields(chart: &Chart, random: usize, seed: u64) -> Vec<TestField> {
    let dim = chart.dim();
    let mut out: Vec<TestField> = (0..dim).map(|k| TestField { label: frame_label(chart, k), field: VecField::frame(chart, k) }).collect();
    for k in 0..dim {
        let u = Expr::var(chart.var(k));
        let f = Expr::one() + u.powi(2).scale(0.5);
        out.push(TestField {
            label: format!("(1 + {}^2/2)*{}", chart.var(k), frame_label(chart, k)),
            field: VecField::frame(chart, k).mul_fn(&f),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for r in 0..random {
        out.push(TestField { label: format!("poly{}", r + 1), field: random_field(chart, 2, &mut rng) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_reproducible_and_inside_the_box() {
        let c = Chart::new(1, 1);
        let bx = SampleBox { x: vec![(-1.0, 1.0), (0.5, 0.5), (2.0, 3.0)], y: vec![(-0.1, 0.1); 3] };
        let a = sample_points(&bx, 16, 7);
        assert_eq!(a, sample_points(&bx, 16, 7));
        assert_ne!(a, sample_points(&bx, 16, 8));
        for p in &a {
            assert!(p.x[0] >= -1.0 && p.x[0] < 1.0);
            assert_eq!(p.x[1], 0.5);
            assert!(p.x[2] >= 2.0 && p.x[2] < 3.0);
            assert!(p.y.iter().all(|v| v.abs() <= 0.1));
        }
        assert_eq!(a[0].x.len(), c.n());
    }

    #[test]
    fn spanning_set_size() {
        let c = Chart::new(1, 1);
        let fields = spanning_fields(&c, 8, 1);
        assert_eq!(fields.len(), 2 * c.dim() + 8);
        assert_eq!(fields[0].label, "d/dx1");
        assert_eq!(fields[3].label, "d/dy1");
    }

    #[test]
    fn random_polynomials_respect_degree() {
        let c = Chart::new(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_polynomial(&c, 2, 5, &mut rng);
        // third derivatives of a quadratic vanish everywhere
        let v = c.var(0);
        let w = c.var(4);
        let d3 = p.diff(v).diff(w).diff(v);
        let pt = Point::new(vec![0.3, 0.1, -0.2], vec![0.5, 0.6, 0.7]);
        assert_eq!(d3.eval(&pt).unwrap(), 0.0);
    }
}
