use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsoError {
    #[error("matrix is not an isotropic orthogonal matrix: {0}")]
    NotOrthogonal(String),
    #[error("subgroup parameters fit none of the seven types (nearest: {nearest})")]
    Unclassifiable { nearest: String },
    #[error("curve plane {plane} is not available in {signature} space")]
    IncompatiblePlane { plane: String, signature: String },
    #[error("surface is not admissible at (u={u}, t={t}): |X12| = {x12:e}")]
    NotAdmissible { u: f64, t: f64, x12: f64 },
    #[error("no normal-form chart for family {0}")]
    ChartUnavailable(String),
    #[error("no closed-form curvature for family {0}")]
    NoClosedForm(String),
    #[error("quadrature did not converge on [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },
    #[error("no sub-interval admits an arc-length reconstruction")]
    EmptyValidity,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, IsoError>;
