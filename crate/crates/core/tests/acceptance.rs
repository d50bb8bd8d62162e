//! The acceptance suite: thirteen criteria at `k1 = k2 = 1` with 64
//! sample points, each printed as one PASS or FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

#![allow(clippy::needless_range_loop)]

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::*;
use nalgebra::DVector;

use pacfin::bundle::{Bundle, Point, VecField};
use pacfin::calculus::{is_killing_h, is_killing_v, normality_tensors};
use pacfin::cli::run::run;
use pacfin::cli::spec::load_spec;
use pacfin::connection::{
    canonical_connection, check_k_paracontact_criterion, check_koszul, check_metricity, check_phi_derivative_identity, check_symmetry,
    FinslerConnection,
};
use pacfin::curvature::{self as curv, CurvatureDerivative, Geometry, Hypotheses, PointGeometry, Scope};
use pacfin::expr::Tape;
use pacfin::instances;
use pacfin::sample::random_field;
use pacfin::structure::{self, PacStructure};
use pacfin::verify::{CheckReport, Context, Status};

const SAMPLES: usize = 64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ctx(s: &PacStructure, seed: u64, tol: f64) -> Context {
    context(&s.chart(), SAMPLES, seed, tol)
}

fn connection(s: &PacStructure, c: &Context) -> FinslerConnection {
    canonical_connection(&s.bundle, &s.metric, &c.points).unwrap()
}

fn hypotheses(k_paracontact: bool, para_sasakian: bool) -> Hypotheses {
    Hypotheses { k_paracontact, para_sasakian }
}

fn clause(r: &CheckReport, name: &str) -> f64 {
    r.clause(name).unwrap_or_else(|| panic!("no clause `{name}`")).value
}

/// A random unit vector in one distribution, `G`-orthogonal to `ξ`.
fn unit_orthogonal(pg: &PointGeometry, horizontal: bool, r: &mut rand_chacha::ChaCha8Rng) -> DVector<f64> {
    loop {
        let x = pg.project(&random_vector(pg.dim(), r), horizontal);
        let x = &x - pg.xi(horizontal) * pg.eta(horizontal, &x);
        let nn = pg.g(&x, &x);
        if nn.abs() > 1e-2 {
            return x / nn.abs().sqrt();
        }
    }
}

fn c1_differentiation() -> Outcome {
    let c = chart();
    let mut r = rng(101);
    let pts = points(&c, 100, 102);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let e = random_expression(&c, &mut r);
        let tape = Tape::compile(std::slice::from_ref(&e));
        let f = |p: &Point| vec![tape.eval_one(p).unwrap()];
        let grad: Vec<_> = (0..c.dim()).map(|k| e.diff(c.var(k))).collect();
        let gt = Tape::compile(&grad);
        for p in &pts {
            let sym = gt.eval(p).unwrap();
            for (k, s) in sym.iter().enumerate() {
                let num = fd(&f, p, k, 1e-3)[0];
                worst = worst.max((s - num).abs() / (1.0 + s.abs()));
            }
        }
    }
    ensure(worst < 1e-6, format!("max scaled error {worst:.2e}"))?;
    Ok(format!("100 expressions x 100 points, max scaled error {worst:.2e}"))
}

fn c2_brackets() -> Outcome {
    let c = chart();
    let nl = random_connection(&c, 201);
    let b = Bundle::new(c, nl.clone());
    let (n, m) = (c.n(), c.m());
    let coeff =
        |q: &Point| -> Vec<f64> { (0..n).flat_map(|i| (0..m).map(move |a| (i, a))).map(|(i, a)| nl.get(i, a).eval(q).unwrap()).collect() };
    let brackets: Vec<Vec<_>> =
        (0..n).map(|i| (0..n).map(|j| b.bracket(&VecField::delta(&c, i), &VecField::delta(&c, j))).collect()).collect();
    let mut worst: f64 = 0.0;
    for p in points(&c, 100, 202) {
        let nv = coeff(&p);
        let dn: Vec<Vec<f64>> = (0..c.dim()).map(|k| fd(&coeff, &p, k, 1e-2)).collect();
        let delta = |j: usize, i: usize, a: usize| dn[j][i * m + a] - (0..m).map(|bb| nv[j * m + bb] * dn[n + bb][i * m + a]).sum::<f64>();
        for i in 0..n {
            for j in 0..n {
                let br = brackets[i][j].eval(&p).unwrap();
                worst = worst.max(max_abs(br[..n].iter().copied()));
                for a in 0..m {
                    worst = worst.max((br[n + a] - (delta(j, i, a) - delta(i, j, a))).abs());
                }
            }
        }
    }
    ensure(worst < 1e-10, format!("bracket residual {worst:.2e}"))?;
    let mut r = rng(203);
    let (x, y, z) = (random_field(&c, 2, &mut r), random_field(&c, 2, &mut r), random_field(&c, 2, &mut r));
    let j = &(&b.bracket(&x, &b.bracket(&y, &z)) + &b.bracket(&y, &b.bracket(&z, &x))) + &b.bracket(&z, &b.bracket(&x, &y));
    let tape = Tape::compile(&j.components().cloned().collect::<Vec<_>>());
    let jac = points(&c, 100, 204).iter().map(|p| max_abs(tape.eval(p).unwrap())).fold(0.0, f64::max);
    ensure(jac < 1e-9, format!("Jacobi residual {jac:.2e}"))?;
    Ok(format!("bracket {worst:.2e}, Jacobi {jac:.2e}"))
}

fn c3_canonical_connection() -> Outcome {
    let (b, g) = random_metric_bundle(301);
    let cx = context(&b.chart, SAMPLES, 302, 1e-8);
    let d = canonical_connection(&b, &g, &cx.points).unwrap();
    let met = check_metricity(&d, &g, &cx).unwrap();
    ensure(met.clauses.len() == 16, "expected sixteen metricity clauses")?;
    ensure(met.max() < 1e-8, format!("metricity {:?}", met.worst()))?;
    let sym = check_symmetry(&d, &cx).unwrap();
    ensure(sym.max() < 1e-8, format!("torsion {:?}", sym.worst()))?;
    let kos = check_koszul(&d, &g, &cx).unwrap();
    ensure(kos.max() < 1e-8, format!("Koszul {:?}", kos.worst()))?;

    let c = chart();
    let base = vec![
        vec![ex("1 + 0.3*x1^2", &c), ex("0.2*x2*x3", &c), ex("0.1*sin(x1)", &c)],
        vec![ex("0.2*x2*x3", &c), ex("-1 + 0.2*x3", &c), ex("0.1*x1*x2", &c)],
        vec![ex("0.1*sin(x1)", &c), ex("0.1*x1*x2", &c), ex("exp(0.2*x2)", &c)],
    ];
    let fibre = pacfin::dtensor::Metric::identity(&c).h;
    let g0 = pacfin::dtensor::Metric::new(base.clone(), fibre);
    let pts = points(&c, SAMPLES, 303);
    let d0 = canonical_connection(&Bundle::flat(c), &g0, &pts).unwrap();
    let mut chris: f64 = 0.0;
    for p in &pts {
        let want = classical_christoffel(&base, p);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    chris = chris.max((d0.gamma(i, j, k).eval(p).unwrap() - want[i][j][k]).abs());
                }
            }
        }
    }
    ensure(chris < 1e-9, format!("Christoffel mismatch {chris:.2e}"))?;
    Ok(format!("metricity {:.2e} (16 blocks), torsion {:.2e}, Koszul {:.2e}, Christoffel {chris:.2e}", met.max(), sym.max(), kos.max()))
}

fn c4_structure_theorems() -> Outcome {
    let mut r = rng(401);
    let mut tested = 0;
    let mut worst: f64 = 0.0;
    let bases = [
        instances::flat(1, 1),
        instances::heisenberg(),
        instances::sl2(),
        instances::mixed(),
        instances::killing_broken(),
        instances::generic(),
        instances::sheared(),
    ];
    for (k, base) in bases.iter().enumerate() {
        for t in 0..4 {
            use rand::Rng;
            let mut mat = || nalgebra::DMatrix::identity(3, 3) + nalgebra::DMatrix::from_fn(3, 3, |_, _| r.random_range(-0.4..0.4));
            let s = if t == 0 { base.clone() } else { instances::conjugate(base, &mat(), &mat()) };
            let cx = ctx(&s, 410 + k as u64, 1e-8);
            if structure::check_axioms(&s, &cx).unwrap().max() >= 1e-10 {
                continue;
            }
            tested += 1;
            let der = structure::derived_identities(&s, &cx).unwrap().max();
            worst = worst.max(der);
            ensure(der < 1e-8, format!("derived identities {der:.2e} on instance {k}"))?;
            for p in &cx.points {
                let rank = structure::rank_phi(&s, p).unwrap();
                ensure(rank == 4, format!("rank {rank} at {p}"))?;
            }
        }
    }
    ensure(tested >= 20, format!("only {tested} structures passed the axioms"))?;
    Ok(format!("{tested} structures, derived identities {worst:.2e}, rank 4 everywhere"))
}

fn c5_normality() -> Outcome {
    let s = instances::heisenberg();
    let n = normality_tensors(&s, &ctx(&s, 501, 1e-8)).unwrap();
    let (n2, n3, n4) = (n.n2.max(), n.n3.max(), n.n4.max());
    ensure(n.n1.max() < 1e-7, format!("reference N1 {:.2e}", n.n1.max()))?;
    ensure(n2 < 1e-7 && n3 < 1e-7 && n4 < 1e-7, format!("N2 {n2:.2e} N3 {n3:.2e} N4 {n4:.2e}"))?;
    let p = instances::sheared();
    let np = normality_tensors(&p, &ctx(&p, 502, 1e-8)).unwrap();
    let w = np.n1.worst();
    ensure(w.value > 1e-3, format!("perturbed N1 only {:.2e}", w.value))?;
    let witness = w.witness.ok_or("perturbed N1 has no witness")?;
    Ok(format!(
        "reference N2 {n2:.2e} N3 {n3:.2e} N4 {n4:.2e}; perturbed N1 {:.3} at {} on [{}]",
        w.value,
        witness.point,
        witness.fields.join(", ")
    ))
}

fn c6_killing_biconditional() -> Outcome {
    let mut lines = Vec::new();
    for (name, s, expect_k) in [
        ("heisenberg", instances::heisenberg(), true),
        ("sl2", instances::sl2(), true),
        ("killing-broken", instances::killing_broken(), false),
    ] {
        let cx = ctx(&s, 601, 1e-7);
        ensure(structure::check_paracontact_metric(&s, &cx).unwrap().max() < 1e-8, format!("{name} not paracontact metric"))?;
        let n = normality_tensors(&s, &cx).unwrap();
        let (n2, n3, n4) = (n.n2.max(), n.n3.max(), n.n4.max());
        ensure(n2 < 1e-7 && n4 < 1e-7, format!("{name}: N2 {n2:.2e} N4 {n4:.2e}"))?;
        let k = is_killing_h(&s, &cx).unwrap().value.max(is_killing_v(&s, &cx).unwrap().value);
        ensure((n3 < 1e-7) == (k < 1e-7), format!("{name}: N3 {n3:.2e} but Killing {k:.2e}"))?;
        ensure((k < 1e-7) == expect_k, format!("{name}: Killing {k:.2e}"))?;
        lines.push(format!("{name} N3 {n3:.1e}/Killing {k:.1e}"));
    }
    Ok(lines.join("; "))
}

fn c7_k_paracontact_criterion() -> Outcome {
    let s = instances::heisenberg();
    let cx = ctx(&s, 701, 1e-8);
    let d = connection(&s, &cx);
    let r = check_k_paracontact_criterion(&d, &s, &cx).unwrap();
    let (i, ii, iii, iv) = (
        clause(&r, "D_{X^H} xi^H + 1/2 phi X^H"),
        clause(&r, "G^H([xi^H, X^V]^H, Y^H)"),
        clause(&r, "D_{X^V} xi^V + 1/2 phi X^V"),
        clause(&r, "G^V([xi^V, X^H]^V, Y^V)"),
    );
    ensure(i < 1e-8 && iii < 1e-8, format!("(i) {i:.2e} (iii) {iii:.2e}"))?;
    ensure(ii < 1e-10 && iv < 1e-10, format!("(ii) {ii:.2e} (iv) {iv:.2e}"))?;
    let kb = instances::killing_broken();
    let cb = ctx(&kb, 702, 1e-8);
    let rb = check_k_paracontact_criterion(&connection(&kb, &cb), &kb, &cb).unwrap();
    ensure(rb.max() > 1e-3, "criterion holds on the Killing-broken instance")?;
    Ok(format!("(i) {i:.2e} (ii) {ii:.2e} (iii) {iii:.2e} (iv) {iv:.2e}; broken instance {:.2}", rb.max()))
}

fn c8_flag_constant() -> Outcome {
    let s = instances::heisenberg();
    let cx = ctx(&s, 801, 1e-8);
    let d = connection(&s, &cx);
    let geo = Geometry::new(&s, &d);
    let mut r = rng(802);
    let (mut wv, mut wh, mut corr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for p in cx.points.iter().take(20) {
        let pg = geo.at(p).unwrap();
        let u = unit_orthogonal(&pg, false, &mut r);
        wv = wv.max((pg.flag_curvature(&u, &pg.xi_v).unwrap() + 0.25).abs());
        let u = unit_orthogonal(&pg, true, &mut r);
        corr = corr.max(pg.g(&pg.bracket_correction(&u, &pg.xi_h), &u).abs());
        wh = wh.max((pg.flag_curvature(&u, &pg.xi_h).unwrap() + 0.25).abs());
    }
    ensure(corr < 1e-12, format!("correction term does not vanish: {corr:.2e}"))?;
    ensure(wv < 1e-6 && wh < 1e-6, format!("vertical {wv:.2e}, horizontal {wh:.2e}"))?;
    Ok(format!("20 random unit X: |K + 1/4| vertical {wv:.2e}, horizontal {wh:.2e}"))
}

fn suite(s: &PacStructure, seed: u64, hyp: Hypotheses) -> curv::CurvatureReport {
    let cx = ctx(s, seed, 1e-8);
    let d = connection(s, &cx);
    curv::theorem_suite(s, &d, &cx, hyp).unwrap()
}

fn c9_para_sasakian_identities() -> Outcome {
    let rep = suite(&instances::heisenberg(), 901, hypotheses(true, true));
    let mut parts = Vec::new();
    for name in [curv::DPHI_H, curv::DPHI_V, curv::R_XI_V, curv::R_XI_H, curv::LEMMA_V, curv::LEMMA_H] {
        let c = rep.check(name).unwrap();
        ensure(c.status == Status::Pass && c.residual.value < 1e-8, format!("{name}: {:.2e}", c.residual.value))?;
        parts.push(format!("{:.1e}", c.residual.value));
    }
    Ok(format!("(D phi)^H, (D phi)^V, R xi^V, R xi^H, lemma V, lemma H: {}", parts.join(", ")))
}

fn c10_ricci_constants() -> Outcome {
    let s = instances::heisenberg();
    let cx = ctx(&s, 1001, 1e-8);
    let d = connection(&s, &cx);
    let geo = Geometry::new(&s, &d);
    let k2 = s.chart().k2 as f64;
    let mut r = rng(1002);
    let (mut xixi, mut xxi, mut frame): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for p in &cx.points {
        let pg = geo.at(p).unwrap();
        let fv = pg.pseudo_orthonormal_frame(false, None).unwrap();
        xixi = xixi.max((pg.ricci(&fv, &pg.xi_v, &pg.xi_v) + k2 / 2.0).abs());
        let x = pg.project(&random_vector(pg.dim(), &mut r), false);
        xxi = xxi.max((pg.ricci(&fv, &x, &pg.xi_v) + k2 / 2.0 * pg.eta(false, &x)).abs());
        for horizontal in [true, false] {
            let f0 = pg.pseudo_orthonormal_frame(horizontal, None).unwrap();
            let cands: Vec<_> = (0..3).map(|_| random_vector(pg.dim(), &mut r)).collect();
            let f1 = pg.pseudo_orthonormal_frame(horizontal, Some(&cands)).unwrap();
            let x = pg.project(&random_vector(pg.dim(), &mut r), horizontal);
            let y = pg.project(&random_vector(pg.dim(), &mut r), horizontal);
            frame = frame.max((pg.ricci(&f0, &x, &y) - pg.ricci(&f1, &x, &y)).abs());
        }
    }
    ensure(xixi < 1e-6 && xxi < 1e-6, format!("S^V(xi, xi) {xixi:.2e}, S^V(X, xi) {xxi:.2e}"))?;
    ensure(frame < 1e-8, format!("frame dependence {frame:.2e}"))?;
    let rep = suite(&s, 1003, hypotheses(true, true));
    for name in [curv::RICCI_H_X, curv::RICCI_H_XI, curv::RICCI_H_X_EQUIV, curv::RICCI_H_XI_EQUIV] {
        let c = rep.check(name).unwrap();
        ensure(c.status == Status::Pass, format!("{name}: {:.2e}", c.residual.value))?;
    }
    Ok(format!("|S^V(xi,xi) + k2/2| {xixi:.2e}, |S^V(X,xi) + k2/2 eta| {xxi:.2e}, frame change {frame:.2e}"))
}

fn c11_phi_flag() -> Outcome {
    // heisenberg: para-Sasakian, but the vertical curvature is nowhere parallel
    let h = instances::heisenberg();
    let rep = suite(&h, 1101, hypotheses(true, true));
    let gate = rep.check(curv::PHI_FLAG_V).unwrap().status;
    ensure(gate == Status::HypothesisNotMet, format!("heisenberg gate reported {}", gate.as_str()))?;

    let s = instances::mixed();
    let cx = ctx(&s, 1102, 1e-8);
    let d = connection(&s, &cx);
    let geo = Geometry::new(&s, &d);
    let dr = CurvatureDerivative::new(&d, &geo.curvature);
    let mut r = rng(1103);
    let (mut found, mut worst): (usize, f64) = (0, 0.0);
    for p in &cx.points {
        if dr.local_symmetry_residual(p, Scope::Vertical).unwrap() >= 1e-8 {
            continue;
        }
        found += 1;
        let pg = geo.at(p).unwrap();
        let u = unit_orthogonal(&pg, false, &mut r);
        worst = worst.max((pg.vertical_phi_flag(&u).unwrap() + 0.25).abs());
    }
    ensure(found > 0, "no vertically parallel points on the mixed instance")?;
    ensure(worst < 1e-6, format!("|K(X, phi X) + 1/4| = {worst:.2e}"))?;
    let c = suite(&s, 1102, hypotheses(true, true));
    let c = c.check(curv::PHI_FLAG_V).unwrap();
    ensure(c.status == Status::Pass, format!("suite reported {}", c.status.as_str()))?;
    Ok(format!("heisenberg gate hypothesis-not-met; mixed: {found}/{SAMPLES} parallel points, |K + 1/4| {worst:.2e}"))
}

fn c12_phi_derivative_identity() -> Outcome {
    let s = instances::generic();
    let cx = ctx(&s, 1201, 1e-7);
    let n1 = normality_tensors(&s, &cx).unwrap().n1.max();
    ensure(n1 > 1e-3, "generic instance is normal")?;
    let d = connection(&s, &cx);
    let r = check_phi_derivative_identity(&d, &s, &cx).unwrap();
    ensure(r.max() < 1e-7, format!("{:?}", r.worst()))?;
    Ok(format!("horizontal {:.2e}, vertical {:.2e} (N1 = {n1:.2})", r.clauses[0].value, r.clauses[1].value))
}

fn c13_determinism() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in ["heisenberg", "flat"] {
        let spec = root.join(format!("{name}.json"));
        let golden = std::fs::read(root.join("golden").join(format!("{name}.report.json"))).map_err(|e| e.to_string())?;
        let inst = load_spec(&spec).map_err(|e| e.to_string())?;
        let a = run(&inst).unwrap().to_json();
        let b = run(&inst).unwrap().to_json();
        ensure(a == b, format!("{name}: in-process runs differ"))?;
        ensure(a.as_bytes() == golden.as_slice(), format!("{name}: report differs from golden"))?;
        let out = dir.path().join(format!("{name}.json"));
        let st = Command::new(env!("CARGO_BIN_EXE_pacfin"))
            .arg("check")
            .arg(&spec)
            .arg("--report")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(st.status.code() == Some(0), format!("{name}: exit {:?}", st.status.code()))?;
        ensure(std::fs::read(&out).unwrap() == golden, format!("{name}: binary report differs from golden"))?;
    }
    Ok("heisenberg and flat: repeated runs and binary output byte-identical to golden".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        ("differentiation oracle", c1_differentiation),
        ("bracket oracle", c2_brackets),
        ("canonical connection", c3_canonical_connection),
        ("structure theorems", c4_structure_theorems),
        ("normality cascade", c5_normality),
        ("Killing iff N3 = 0", c6_killing_biconditional),
        ("K-paracontact criterion", c7_k_paracontact_criterion),
        ("flag curvature -1/4", c8_flag_constant),
        ("para-Sasakian identities", c9_para_sasakian_identities),
        ("Ricci constants", c10_ricci_constants),
        ("vertical phi-flag curvature", c11_phi_flag),
        ("phi derivative identity", c12_phi_derivative_identity),
        ("CLI determinism", c13_determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", k + 1),
            Err(why) => {
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
