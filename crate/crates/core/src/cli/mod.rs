//! The `pacfin` command line: load an instance file, classify it, run the
//! checks and print or save the report.

pub mod json;
pub mod report;
pub mod run;
pub mod spec;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use run::Overrides;

#[derive(Debug, Parser)]
#[command(name = "pacfin", version, about = "Certify almost paracontact Finsler structures at sampled points")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify and run every check; exits 1 if any check fails.
    Check {
        spec: PathBuf,
        /// Write the structured report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the structured report instead of the table.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print the classification ladder only.
    Classify {
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Flag curvatures and Ricci entries at one point.
    Curvature {
        spec: PathBuf,
        /// `x=a,b,c,y=d,e,f`
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        json: bool,
    },
}

/// Exit code when every check passes or is not applicable.
pub const EXIT_OK: i32 = 0;
/// Exit code when some check fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for unreadable specs and evaluation errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] spec::SpecError),
    #[error(transparent)]
    Geometry(#[from] crate::error::Error),
    #[error(transparent)]
    Point(#[from] run::PointError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid option: {0}")]
    Option(String),
}

/// Runs `cli`, writing to `out`, and returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Check { spec, report, json, tolerance, seed, samples } => {
            if tolerance.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return Err(CliError::Option("--tolerance must be positive".into()));
            }
            if *samples == Some(0) {
                return Err(CliError::Option("--samples must be at least 1".into()));
            }
            let mut inst = spec::load_spec(spec)?;
            Overrides { tolerance: *tolerance, seed: *seed, samples: *samples }.apply(&mut inst);
            let r = run::run(&inst)?;
            if let Some(path) = report {
                std::fs::write(path, r.to_json())?;
            }
            out.write_all(if *json { r.to_json() } else { r.to_text() }.as_bytes())?;
            Ok(if r.any_failed() { EXIT_FAIL } else { EXIT_OK })
        }
        Command::Classify { spec, json } => {
            let inst = spec::load_spec(spec)?;
            let c = report::Classification::from(&run::classify(&inst)?);
            if *json {
                out.write_all(json::to_string(&c).as_bytes())?;
            } else {
                out.write_all(c.to_text().as_bytes())?;
            }
            Ok(if c.consistency.iter().all(|c| c.holds) { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Curvature { spec, point, json } => {
            let inst = spec::load_spec(spec)?;
            let c = inst.structure.chart();
            let p = run::parse_point(point, c.n(), c.m())?;
            let t = run::curvature_at(&inst, &p)?;
            if *json {
                out.write_all(json::to_string(&t).as_bytes())?;
            } else {
                out.write_all(t.to_text().as_bytes())?;
            }
            Ok(EXIT_OK)
        }
    }
}
