//! Error type shared by every engine module.

/// Errors reported by the calculus engine.
///
/// All operations are total over valid inputs; these variants cover contract
/// violations (mismatched charts, degree constraints) and the two runtime
/// failure modes of numeric evaluation (unbound coordinates, non-finite
/// values).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("unbound coordinate `{0}` at evaluation")]
    UnboundCoordinate(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("form is not horizontal over {0}: offending part {1}")]
    NotHorizontal(String, String),

    #[error("vector field does not live on a factor of the cylinder: {0}")]
    FactorMismatch(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("symbolic integration unsupported for `{0}` (outside the closed class)")]
    SymbolicIntegrationUnsupported(String),

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("relative contraction only defined for the infinitesimal homotopy: {0}")]
    UnsupportedRelativeContraction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
