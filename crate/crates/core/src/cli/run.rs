//! Orchestration: classify, then run every check in registry order, each
//! gated on the rungs it assumes.

use crate::bundle::Point;
use crate::calculus::{self, Ladder};
use crate::connection::{self, FinslerConnection};
use crate::curvature::{self, CurvatureTable, Geometry, Hypotheses, SUITE};
use crate::error::Result;
use crate::sample::{sample_points, spanning_fields, GENERATOR};
use crate::structure;
use crate::verify::{CheckReport, Context, Residual, Status, Witness};

use super::report::{CheckEntry, Classification, Report, TableEntry};
use super::spec::Instance;

/// Random test fields added to the adapted frame and its scaled copy.
pub const RANDOM_FIELDS: usize = 8;

pub const AXIOMS: &str = "almost paracontact axioms";
pub const DERIVED: &str = "phi xi = 0 and eta o phi = 0";
pub const RANK: &str = "rank phi = 2(k1 + k2)";
pub const SIGNATURE: &str = "signature (k1 + 1, k1) and (k2 + 1, k2)";
pub const NORMAL_CASCADE: &str = "normal implies N2 = N3 = N4 = 0";
pub const PCM_N2_N4: &str = "paracontact metric implies N2 = N4 = 0";
pub const PCM_KILLING_N3: &str = "paracontact metric: Killing iff N3 = 0";
pub const SASAKIAN_KILLING: &str = "para-Sasakian implies Killing";
pub const METRICITY: &str = "canonical connection: metricity";
pub const SYMMETRY: &str = "canonical connection: (h)h- and (v)v-torsion";
pub const KOSZUL: &str = "canonical connection: Koszul formula";
pub const K_CRITERION: &str = "K-paracontact iff D xi = -1/2 phi and the bracket conditions";
pub const PHI_DERIVATIVE: &str = "2G((D_X phi)Y, Z) in terms of d Phi, N1, N2, d eta";
pub const PCM_PHI_DERIVATIVE: &str = "paracontact metric: reduced (D_X phi) identity and D_xi phi = 0";

/// Every check name in report order.
pub fn registry() -> Vec<&'static str> {
    let mut names = vec![
        AXIOMS,
        DERIVED,
        RANK,
        SIGNATURE,
        NORMAL_CASCADE,
        PCM_N2_N4,
        PCM_KILLING_N3,
        SASAKIAN_KILLING,
        METRICITY,
        SYMMETRY,
        KOSZUL,
        K_CRITERION,
        PHI_DERIVATIVE,
        PCM_PHI_DERIVATIVE,
    ];
    names.extend(SUITE);
    names
}

/// Overrides from the command line.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, inst: &mut Instance) {
        if let Some(t) = self.tolerance {
            inst.tolerance = t;
        }
        if let Some(s) = self.seed {
            inst.seed = s;
        }
        if let Some(k) = self.samples {
            inst.count = k;
        }
    }
}

/// Sample points and test fields, both drawn from the instance seed.
pub fn context(inst: &Instance) -> Context {
    let c = inst.structure.chart();
    Context::new(sample_points(&inst.sample_box, inst.count, inst.seed), spanning_fields(&c, RANDOM_FIELDS, inst.seed), inst.tolerance)
}

pub fn classify(inst: &Instance) -> Result<Ladder> {
    calculus::classify(&inst.structure, &context(inst))
}

fn entry(name: &str, holds: bool, tol: f64, r: impl FnOnce() -> Result<Residual>) -> Result<CheckEntry> {
    if !holds {
        return Ok(CheckEntry::not_met(name));
    }
    let r = r()?;
    let status = if r.passes(tol) { Status::Pass } else { Status::Fail };
    Ok(CheckEntry::new(name, status, &r))
}

fn worst_of(reports: &[&CheckReport]) -> Residual {
    reports.iter().map(|r| r.worst()).reduce(|a, b| if b.value > a.value { b } else { a }).expect("at least one report")
}

/// An integer-valued per-point check; the residual is the largest
/// deviation from `expected`.
fn pointwise(points: &[Point], mut deviation: impl FnMut(&Point) -> Result<f64>) -> Result<Residual> {
    let mut worst = Residual::zero("");
    for p in points {
        let d = deviation(p)?;
        if d > worst.value || worst.witness.is_none() {
            worst.value = d.max(worst.value);
            worst.witness = Some(Witness { point: p.clone(), fields: vec![] });
        }
    }
    Ok(worst)
}

/// A biconditional between a rung and a residual being small. Passes when
/// both sides agree; the reported residual is the tested quantity.
fn iff_entry(name: &str, gate: bool, rung: bool, r: Residual, tol: f64) -> CheckEntry {
    if !gate {
        return CheckEntry::not_met(name);
    }
    let status = if r.passes(tol) == rung { Status::Pass } else { Status::Fail };
    CheckEntry::new(name, status, &r)
}

/// Runs the ladder and every check, in [`registry`] order.
pub fn run(inst: &Instance) -> Result<Report> {
    let s = &inst.structure;
    let ctx = context(inst);
    let tol = ctx.tolerance;
    let ladder = calculus::classify(s, &ctx)?;
    let apc = ladder.holds(calculus::RUNGS[0]);
    let apcm = ladder.holds(calculus::RUNGS[1]);
    let pcm = ladder.holds(calculus::RUNGS[2]);
    let kpc = ladder.holds(calculus::RUNGS[3]);
    let normal = ladder.holds(calculus::RUNGS[4]);
    let sasakian = ladder.holds(calculus::RUNGS[5]);
    let c = s.chart();

    let mut checks = vec![entry(AXIOMS, true, tol, || Ok(structure::check_axioms(s, &ctx)?.worst()))?];
    checks.push(entry(DERIVED, apc, tol, || Ok(structure::derived_identities_unchecked(s, &ctx)?.worst()))?);
    checks.push(entry(RANK, apc, tol, || {
        let want = 2 * (c.k1 + c.k2);
        pointwise(&ctx.points, |p| Ok(structure::rank_phi(s, p)?.abs_diff(want) as f64))
    })?);
    checks.push(entry(SIGNATURE, apcm, tol, || {
        let want = ((c.k1 + 1, c.k1), (c.k2 + 1, c.k2));
        pointwise(&ctx.points, |p| {
            let ((a, b), (e, f)) = structure::signature(s, p)?;
            Ok((a.abs_diff(want.0 .0) + b.abs_diff(want.0 .1) + e.abs_diff(want.1 .0) + f.abs_diff(want.1 .1)) as f64)
        })
    })?);

    let n = ladder.normality.as_ref();
    checks.push(entry(NORMAL_CASCADE, normal, tol, || {
        let n = n.expect("normality evaluated when normal");
        Ok(worst_of(&[&n.n2, &n.n3, &n.n4]))
    })?);
    checks.push(entry(PCM_N2_N4, pcm, tol, || {
        let n = n.expect("normality evaluated when paracontact metric");
        Ok(worst_of(&[&n.n2, &n.n4]))
    })?);
    checks.push(match n {
        Some(n) => iff_entry(PCM_KILLING_N3, pcm, kpc, n.n3.worst(), tol),
        None => CheckEntry::not_met(PCM_KILLING_N3),
    });
    checks.push(entry(SASAKIAN_KILLING, sasakian, tol, || {
        let (h, v) = ladder.killing.clone().expect("Killing evaluated when paracontact metric");
        Ok(if v.value > h.value { v } else { h })
    })?);

    let d: FinslerConnection = connection::canonical_connection(&s.bundle, &s.metric, &ctx.points)?;
    checks.push(entry(METRICITY, true, tol, || Ok(connection::check_metricity(&d, &s.metric, &ctx)?.worst()))?);
    checks.push(entry(SYMMETRY, true, tol, || Ok(connection::check_symmetry(&d, &ctx)?.worst()))?);
    checks.push(entry(KOSZUL, true, tol, || Ok(connection::check_koszul(&d, &s.metric, &ctx)?.worst()))?);
    checks.push(if pcm {
        let r = connection::k_paracontact_criterion_unchecked(&d, s, &ctx)?.worst();
        iff_entry(K_CRITERION, true, kpc, r, tol)
    } else {
        CheckEntry::not_met(K_CRITERION)
    });
    checks.push(entry(PHI_DERIVATIVE, apcm, tol, || Ok(connection::phi_derivative_unchecked(&d, s, &ctx)?.worst()))?);
    checks.push(entry(PCM_PHI_DERIVATIVE, pcm, tol, || Ok(connection::paracontact_phi_derivative_unchecked(&d, s, &ctx)?.worst()))?);

    let mut tables = Vec::new();
    if apcm {
        let hyp = Hypotheses { k_paracontact: kpc, para_sasakian: sasakian };
        let suite = curvature::theorem_suite(s, &d, &ctx, hyp)?;
        checks.extend(suite.checks.iter().map(|t| CheckEntry::new(&t.name, t.status, &t.residual)));
        tables = suite.tables.iter().map(TableEntry::from).collect();
    } else {
        checks.extend(SUITE.iter().map(|name| CheckEntry::not_met(name)));
    }

    Ok(Report {
        format: super::report::REPORT_FORMAT,
        generator: GENERATOR,
        seed: inst.seed,
        samples: inst.count,
        tolerance: tol,
        classification: Classification::from(&ladder),
        checks,
        curvature: tables,
    })
}

/// The curvature table at one point.
pub fn curvature_at(inst: &Instance, p: &Point) -> Result<TableEntry> {
    let s = &inst.structure;
    let d = connection::canonical_connection(&s.bundle, &s.metric, std::slice::from_ref(p))?;
    let geo = Geometry::new(s, &d);
    Ok(TableEntry::from(&CurvatureTable::at(&geo.at(p)?)?))
}

#[derive(Debug, PartialEq, thiserror::Error)]
#[error("cannot read point `{text}`: {message}")]
pub struct PointError {
    text: String,
    message: String,
}

/// Parses `x=a,b,c,y=d,e,f`; brackets around either list are optional.
pub fn parse_point(text: &str, n: usize, m: usize) -> std::result::Result<Point, PointError> {
    let fail = |message: String| PointError { text: text.to_string(), message };
    let t = text.trim();
    let rest = t.strip_prefix("x=").ok_or_else(|| fail("expected it to start with `x=`".into()))?;
    let at = rest.find("y=").ok_or_else(|| fail("missing `y=`".into()))?;
    let numbers = |s: &str, want: usize, name: &str| -> std::result::Result<Vec<f64>, PointError> {
        let v: Vec<f64> = s
            .split(|ch: char| ch == ',' || ch.is_whitespace() || ch == '[' || ch == ']')
            .filter(|w| !w.is_empty())
            .map(|w| w.parse::<f64>().map_err(|e| fail(format!("`{w}`: {e}"))))
            .collect::<std::result::Result<_, _>>()?;
        if v.len() != want {
            return Err(fail(format!("{name} needs {want} coordinates, found {}", v.len())));
        }
        Ok(v)
    };
    Ok(Point::new(numbers(&rest[..at], n, "x")?, numbers(&rest[at + 2..], m, "y")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::spec::InstanceSpec;
    use crate::instances;
    use crate::sample::SampleBox;
    use crate::structure::PacStructure;

    fn instance(s: PacStructure, count: usize) -> Instance {
        let bx = SampleBox::uniform(&s.chart(), -0.5, 0.5);
        InstanceSpec::from_structure(&s, &bx, count, 7, 1e-8).build().unwrap()
    }

    #[test]
    fn report_follows_the_registry() {
        let r = run(&instance(instances::flat(1, 1), 3)).unwrap();
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, registry());
    }

    #[test]
    fn flat_stops_below_paracontact_metric() {
        let r = run(&instance(instances::flat(1, 1), 3)).unwrap();
        let rungs: Vec<bool> = r.classification.rungs.iter().map(|r| r.holds).collect();
        assert_eq!(rungs, [true, true, false, false, true, false]);
        assert!(!r.any_failed(), "{}", r.to_text());
        for name in SUITE {
            assert_eq!(r.check(name).unwrap().status, "hypothesis-not-met");
        }
        assert_eq!(r.check(K_CRITERION).unwrap().status, "hypothesis-not-met");
        assert_eq!(r.check(PHI_DERIVATIVE).unwrap().status, "pass");
        assert_eq!(r.curvature.len(), 3);
    }

    #[test]
    fn heisenberg_passes_everything_it_is_entitled_to() {
        let r = run(&instance(instances::heisenberg(), 3)).unwrap();
        assert!(r.classification.rungs.iter().all(|r| r.holds));
        assert!(!r.any_failed(), "{}", r.to_text());
        let pending: Vec<&str> = r.checks.iter().filter(|c| c.status == "hypothesis-not-met").map(|c| c.name.as_str()).collect();
        assert_eq!(pending, [curvature::PHI_FLAG_V]);
    }

    #[test]
    fn killing_broken_fails_nothing() {
        let r = run(&instance(instances::killing_broken(), 3)).unwrap();
        assert!(!r.any_failed(), "{}", r.to_text());
        assert_eq!(r.classification.top, Some("paracontact metric"));
        assert_eq!(r.check(K_CRITERION).unwrap().status, "pass");
        assert!(r.check(K_CRITERION).unwrap().residual.unwrap() > 1e-3);
    }

    #[test]
    fn broken_axioms_fail_with_witness() {
        let mut s = instances::flat(1, 1);
        s.xi.h[2] = crate::expr::Expr::constant(2.0);
        let r = run(&instance(s, 2)).unwrap();
        let a = r.check(AXIOMS).unwrap();
        assert_eq!(a.status, "fail");
        assert!(a.witness.is_some());
        assert!(r.curvature.is_empty());
        assert!(r.checks.iter().filter(|c| c.name != AXIOMS).all(|c| !c.failed()));
    }

    #[test]
    fn points_parse_with_or_without_brackets() {
        let p = parse_point("x=0.1,0.2,0.3,y=[-1, 0, 1e-1]", 3, 3).unwrap();
        assert_eq!(p, Point::new(vec![0.1, 0.2, 0.3], vec![-1.0, 0.0, 0.1]));
        assert!(parse_point("y=1,2,3", 3, 3).is_err());
        assert!(parse_point("x=1,2,y=1,2,3", 3, 3).is_err());
        assert!(parse_point("x=1,2,a,y=1,2,3", 3, 3).is_err());
    }

    #[test]
    fn curvature_at_a_point_matches_the_suite_table() {
        let inst = instance(instances::sl2(), 2);
        let r = run(&inst).unwrap();
        let t = &r.curvature[1];
        let direct = curvature_at(&inst, &Point::new(t.x.clone(), t.y.clone())).unwrap();
        assert_eq!(&direct, t);
    }
}
