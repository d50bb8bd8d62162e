use crate::bundle::Point;
use crate::expr::EvalError;

/// Failures of the geometric operations.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange { what: &'static str, index: usize, bound: usize },
    #[error("{source} at {point}")]
    Domain { source: EvalError, point: Point },
    #[error("{block} metric block is singular at {point} (det = {det:e})")]
    SingularBlock { block: &'static str, det: f64, point: Point },
    #[error("`{check}` requires {requires}, which fails with residual {residual:e}")]
    Precondition { check: String, requires: String, residual: f64 },
    #[error("degenerate plane: Gram determinant {gram:e}")]
    DegeneratePlane { gram: f64 },
    #[error("pseudo-orthonormal frame breaks down: every remaining candidate has |G(v,v)| <= {threshold:e}")]
    DegeneratePivot { threshold: f64 },
}

impl Error {
    pub(crate) fn domain(source: EvalError, point: &Point) -> Error {
        Error::Domain { source, point: point.clone() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
