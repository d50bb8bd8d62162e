//! The report in its two forms: a serializable tree (the contract) and an
//! aligned text table.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bundle::Point;
use crate::calculus::Ladder;
use crate::curvature::CurvatureTable;
use crate::verify::{Residual, Status, Witness};

pub const REPORT_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub fields: Vec<String>,
}

impl From<&Witness> for WitnessEntry {
    fn from(w: &Witness) -> WitnessEntry {
        WitnessEntry { x: w.point.x.clone(), y: w.point.y.clone(), fields: w.fields.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: &'static str,
    /// `None` when the hypotheses fail and nothing was evaluated.
    pub residual: Option<f64>,
    pub witness: Option<WitnessEntry>,
}

impl CheckEntry {
    pub fn new(name: &str, status: Status, residual: &Residual) -> CheckEntry {
        let evaluated = status != Status::HypothesisNotMet;
        CheckEntry {
            name: name.to_string(),
            status: status.as_str(),
            residual: evaluated.then_some(residual.value),
            witness: residual.witness.as_ref().filter(|_| evaluated).map(WitnessEntry::from),
        }
    }

    pub fn not_met(name: &str) -> CheckEntry {
        CheckEntry { name: name.to_string(), status: Status::HypothesisNotMet.as_str(), residual: None, witness: None }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail.as_str()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RungEntry {
    pub name: &'static str,
    pub holds: bool,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalityEntry {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub n4: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KillingEntry {
    pub horizontal: f64,
    pub vertical: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyEntry {
    pub name: &'static str,
    pub holds: bool,
}

/// The ladder as reported: which rungs hold, the raw tensor residuals and
/// the implications between them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub top: Option<&'static str>,
    pub rungs: Vec<RungEntry>,
    pub normality: Option<NormalityEntry>,
    pub killing: Option<KillingEntry>,
    pub consistency: Vec<ConsistencyEntry>,
}

impl From<&Ladder> for Classification {
    fn from(l: &Ladder) -> Classification {
        Classification {
            top: l.top(),
            rungs: l.rungs.iter().map(|r| RungEntry { name: r.name, holds: r.holds, residual: r.residual }).collect(),
            normality: l.normality.as_ref().map(|n| NormalityEntry { n1: n.n1.max(), n2: n.n2.max(), n3: n.n3.max(), n4: n.n4.max() }),
            killing: l.killing.as_ref().map(|(h, v)| KillingEntry { horizontal: h.value, vertical: v.value }),
            consistency: l.consistency.iter().map(|c| ConsistencyEntry { name: c.name, holds: c.holds }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub flag_h: Vec<f64>,
    pub flag_v: Vec<f64>,
    pub ricci_h: Vec<Vec<f64>>,
    pub ricci_v: Vec<Vec<f64>>,
}

impl From<&CurvatureTable> for TableEntry {
    fn from(t: &CurvatureTable) -> TableEntry {
        TableEntry {
            x: t.point.x.clone(),
            y: t.point.y.clone(),
            flag_h: t.flag_h.clone(),
            flag_v: t.flag_v.clone(),
            ricci_h: t.ricci_h.clone(),
            ricci_v: t.ricci_v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub format: u32,
    pub generator: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub classification: Classification,
    pub checks: Vec<CheckEntry>,
    /// One table per sample point; empty unless `G` is compatible.
    pub curvature: Vec<TableEntry>,
}

impl Report {
    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(CheckEntry::failed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        super::json::to_string(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "generator {}  seed {}  samples {}  tolerance {:e}", self.generator, self.seed, self.samples, self.tolerance);
        out.push('\n');
        out.push_str(&self.classification.to_text());
        out.push('\n');
        let width = self.checks.iter().map(|c| c.status.len()).max().unwrap_or(0);
        for c in &self.checks {
            let residual = c.residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
            let _ = writeln!(out, "{:<width$}  {:>10}  {}", c.status, residual, c.name);
            if c.failed() {
                if let Some(w) = &c.witness {
                    let _ = writeln!(
                        out,
                        "{:<width$}  {:>10}    at {} with [{}]",
                        "",
                        "",
                        Point::new(w.x.clone(), w.y.clone()),
                        w.fields.join(", ")
                    );
                }
            }
        }
        if let Some(t) = self.curvature.first() {
            out.push('\n');
            out.push_str(&t.to_text());
            if self.curvature.len() > 1 {
                let _ = writeln!(out, "({} more points in the structured report)", self.curvature.len() - 1);
            }
        }
        out
    }
}

impl Classification {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.rungs.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.rungs {
            let residual = r.residual.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
            let _ = writeln!(out, "{:<width$}  {:<5}  {:>10}", r.name, r.holds, residual);
        }
        if let Some(n) = &self.normality {
            let _ = writeln!(out, "N1 {:.3e}  N2 {:.3e}  N3 {:.3e}  N4 {:.3e}", n.n1, n.n2, n.n3, n.n4);
        }
        if let Some(k) = &self.killing {
            let _ = writeln!(out, "Killing residuals: horizontal {:.3e}, vertical {:.3e}", k.horizontal, k.vertical);
        }
        for c in self.consistency.iter().filter(|c| !c.holds) {
            let _ = writeln!(out, "inconsistent: {}", c.name);
        }
        let _ = writeln!(out, "top rung: {}", self.top.unwrap_or("none"));
        out
    }
}

impl TableEntry {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "curvature at {}", Point::new(self.x.clone(), self.y.clone()));
        let row = |v: &[f64]| v.iter().map(|a| format!("{a:>10.6}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "  K(E_i^H, xi^H)  {}", row(&self.flag_h));
        let _ = writeln!(out, "  K(E_a^V, xi^V)  {}", row(&self.flag_v));
        let _ = writeln!(out, "  S^H in (E_1, ..., xi^H):");
        for r in &self.ricci_h {
            let _ = writeln!(out, "    {}", row(r));
        }
        let _ = writeln!(out, "  S^V in (E_1, ..., xi^V):");
        for r in &self.ricci_v {
            let _ = writeln!(out, "    {}", row(r));
        }
        out
    }
}
