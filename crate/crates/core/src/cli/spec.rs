//! The instance file: a JSON object with `"version": 1`, the structure as
//! expression strings, and the sampling setup.
//!
//! ```json
//! {
//!   "version": 1,
//!   "k1": 1, "k2": 1,
//!   "nonlinear_connection": [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
//!   "metric_g": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],
//!   "metric_h": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],
//!   "phi_h": [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
//!   "phi_v": [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
//!   "eta_h": ["0", "0", "1"], "eta_v": ["0", "0", "1"],
//!   "xi_h": ["0", "0", "1"], "xi_v": ["0", "0", "1"],
//!   "sample": {"count": 8, "seed": 1, "box": {"x": [[-1, 1], [-1, 1], [-1, 1]], "y": [[-1, 1], [-1, 1], [-1, 1]]}},
//!   "tolerance": 1e-8
//! }
//! ```
//!
//! `nonlinear_connection[i][a]` is `N_i^a`, `metric_g` and `metric_h` are
//! the horizontal and vertical blocks of `G`, and `phi_h[i][j]` is `φ^i_j`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, Chart, NonlinearConnection, VecField};
use crate::dtensor::{Metric, OneForm};
use crate::expr::{parse, Expr, ParseError};
use crate::sample::SampleBox;
use crate::structure::PacStructure;

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("shape error at `{path}`: expected {expected}, found {found}")]
    Shape { path: String, expected: usize, found: usize },
    #[error("expression error at `{path}`: {source}")]
    Expression { path: String, source: ParseError },
    #[error("invalid value at `{path}`: {message}")]
    Value { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleBoxSpec {
    pub x: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    #[serde(rename = "box")]
    pub bounds: SampleBoxSpec,
}

/// The document as written, before shape checks and parsing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub version: u32,
    pub k1: usize,
    pub k2: usize,
    pub nonlinear_connection: Vec<Vec<String>>,
    pub metric_g: Vec<Vec<String>>,
    pub metric_h: Vec<Vec<String>>,
    pub phi_h: Vec<Vec<String>>,
    pub phi_v: Vec<Vec<String>>,
    pub eta_h: Vec<String>,
    pub eta_v: Vec<String>,
    pub xi_h: Vec<String>,
    pub xi_v: Vec<String>,
    pub sample: SampleSpec,
    pub tolerance: f64,
}

/// A validated instance ready to run.
#[derive(Clone, Debug)]
pub struct Instance {
    pub structure: PacStructure,
    pub sample_box: SampleBox,
    pub count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

pub fn load_spec(path: &Path) -> Result<Instance, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    parse_spec(&text)?.build()
}

/// Deserializes strictly; the error names the offending path.
pub fn parse_spec(text: &str) -> Result<InstanceSpec, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| SpecError::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

fn shape(path: &str, expected: usize, found: usize) -> Result<(), SpecError> {
    if expected == found {
        Ok(())
    } else {
        Err(SpecError::Shape { path: path.to_string(), expected, found })
    }
}

fn vector(c: &Chart, name: &str, v: &[String], len: usize) -> Result<Vec<Expr>, SpecError> {
    shape(name, len, v.len())?;
    v.iter()
        .enumerate()
        .map(|(i, s)| parse(s, c).map(|e| e.simplify()).map_err(|source| SpecError::Expression { path: format!("{name}[{i}]"), source }))
        .collect()
}

fn matrix(c: &Chart, name: &str, m: &[Vec<String>], rows: usize, cols: usize) -> Result<Vec<Vec<Expr>>, SpecError> {
    shape(name, rows, m.len())?;
    m.iter().enumerate().map(|(i, row)| vector(c, &format!("{name}[{i}]"), row, cols)).collect()
}

fn bounds(name: &str, b: &[[f64; 2]], len: usize) -> Result<Vec<(f64, f64)>, SpecError> {
    shape(name, len, b.len())?;
    b.iter()
        .enumerate()
        .map(|(i, &[lo, hi])| {
            if lo.is_finite() && hi.is_finite() && lo <= hi {
                Ok((lo, hi))
            } else {
                Err(SpecError::Value { path: format!("{name}[{i}]"), message: format!("need finite lo <= hi, found [{lo}, {hi}]") })
            }
        })
        .collect()
}

impl InstanceSpec {
    /// Checks the version, every shape against `(k1, k2)`, parses every
    /// expression and assembles the structure.
    pub fn build(&self) -> Result<Instance, SpecError> {
        if self.version != SPEC_VERSION {
            return Err(SpecError::Value {
                path: "version".into(),
                message: format!("unsupported version {}, expected {SPEC_VERSION}", self.version),
            });
        }
        if self.sample.count == 0 {
            return Err(SpecError::Value { path: "sample.count".into(), message: "need at least one sample point".into() });
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(SpecError::Value {
                path: "tolerance".into(),
                message: format!("need a positive tolerance, found {}", self.tolerance),
            });
        }
        let c = Chart::new(self.k1, self.k2);
        let (n, m) = (c.n(), c.m());
        let nl = matrix(&c, "nonlinear_connection", &self.nonlinear_connection, n, m)?;
        let structure = PacStructure {
            bundle: Bundle::new(c, NonlinearConnection::new(&c, nl)),
            metric: Metric::new(matrix(&c, "metric_g", &self.metric_g, n, n)?, matrix(&c, "metric_h", &self.metric_h, m, m)?),
            phi_h: matrix(&c, "phi_h", &self.phi_h, n, n)?,
            phi_v: matrix(&c, "phi_v", &self.phi_v, m, m)?,
            eta: OneForm::new(vector(&c, "eta_h", &self.eta_h, n)?, vector(&c, "eta_v", &self.eta_v, m)?),
            xi: VecField::new(vector(&c, "xi_h", &self.xi_h, n)?, vector(&c, "xi_v", &self.xi_v, m)?),
        };
        let sample_box =
            SampleBox { x: bounds("sample.box.x", &self.sample.bounds.x, n)?, y: bounds("sample.box.y", &self.sample.bounds.y, m)? };
        Ok(Instance { structure, sample_box, count: self.sample.count, seed: self.sample.seed, tolerance: self.tolerance })
    }

    /// The document describing `s`, with every expression printed in the
    /// canonical form.
    pub fn from_structure(s: &PacStructure, bx: &SampleBox, count: usize, seed: u64, tolerance: f64) -> InstanceSpec {
        let c = s.chart();
        let vec = |v: &[Expr]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>();
        let mat = |m: &[Vec<Expr>]| m.iter().map(|r| vec(r)).collect::<Vec<_>>();
        let pairs = |b: &[(f64, f64)]| b.iter().map(|&(lo, hi)| [lo, hi]).collect();
        InstanceSpec {
            version: SPEC_VERSION,
            k1: c.k1,
            k2: c.k2,
            nonlinear_connection: mat(s.bundle.connection.coeffs()),
            metric_g: mat(&s.metric.g),
            metric_h: mat(&s.metric.h),
            phi_h: mat(&s.phi_h),
            phi_v: mat(&s.phi_v),
            eta_h: vec(&s.eta.h),
            eta_v: vec(&s.eta.v),
            xi_h: vec(&s.xi.h),
            xi_v: vec(&s.xi.v),
            sample: SampleSpec { count, seed, bounds: SampleBoxSpec { x: pairs(&bx.x), y: pairs(&bx.y) } },
            tolerance,
        }
    }

    pub fn to_json(&self) -> String {
        super::json::to_string(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn flat_spec() -> InstanceSpec {
        let s = instances::flat(1, 1);
        InstanceSpec::from_structure(&s, &SampleBox::uniform(&s.chart(), -1.0, 1.0), 4, 1, 1e-8)
    }

    #[test]
    fn flat_round_trips() {
        let spec = flat_spec();
        let back = parse_spec(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let inst = back.build().unwrap();
        assert_eq!(inst.structure.phi_h[0][1].as_const(), Some(1.0));
        assert_eq!(inst.sample_box.x.len(), 3);
    }

    #[test]
    fn wrong_row_length_names_the_row() {
        let mut spec = flat_spec();
        spec.metric_h[2].pop();
        let err = spec.build().unwrap_err();
        assert!(matches!(&err, SpecError::Shape { path, expected: 3, found: 2 } if path == "metric_h[2]"), "{err}");
        assert!(err.to_string().contains("metric_h[2]"));
    }

    #[test]
    fn unknown_identifier_is_reported_with_path() {
        let mut spec = flat_spec();
        spec.phi_h[0][0] = "x9".into();
        let err = spec.build().unwrap_err();
        match err {
            SpecError::Expression { path, source } => {
                assert_eq!(path, "phi_h[0][0]");
                assert!(matches!(source, ParseError::UnknownIdentifier { .. }));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = flat_spec().to_json().replacen("\"k1\"", "\"extra\": 0, \"k1\"", 1);
        let err = parse_spec(&text).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let text = flat_spec().to_json().replacen("\"seed\": 1", "\"seed\": \"one\"", 1);
        let err = parse_spec(&text).unwrap_err();
        assert!(matches!(&err, SpecError::Schema { path, .. } if path == "sample.seed"), "{err}");
    }

    #[test]
    fn values_are_validated() {
        let mut spec = flat_spec();
        spec.sample.count = 0;
        assert!(matches!(spec.build(), Err(SpecError::Value { path, .. }) if path == "sample.count"));
        let mut spec = flat_spec();
        spec.tolerance = -1.0;
        assert!(matches!(spec.build(), Err(SpecError::Value { path, .. }) if path == "tolerance"));
        let mut spec = flat_spec();
        spec.version = 2;
        assert!(matches!(spec.build(), Err(SpecError::Value { path, .. }) if path == "version"));
        let mut spec = flat_spec();
        spec.sample.bounds.y[1] = [1.0, -1.0];
        assert!(matches!(spec.build(), Err(SpecError::Value { path, .. }) if path == "sample.box.y[1]"));
    }
}
