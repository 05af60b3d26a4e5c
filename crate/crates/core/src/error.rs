use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart is not an immersion at (u, v) = ({u}, {v})")]
    Immersion { u: f64, v: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("tensor is not skew-symmetric (defect {defect:e})")]
    NotSkew { defect: f64 },

    #[error("normal must be a unit vector (|n| = {norm})")]
    NonUnitNormal { norm: f64 },

    #[error("chart is not orthogonal at (u, v) = ({u}, {v}) (defect {defect:e})")]
    NonOrthogonalChart { u: f64, v: f64, defect: f64 },

    #[error("umbilic point at (u, v) = ({u}, {v}); principal directions are undefined")]
    Umbilic { u: f64, v: f64 },

    #[error("degenerate deformation at (u, v) = ({u}, {v}): {detail}")]
    DegenerateDeformation { u: f64, v: f64, detail: String },

    #[error("internal consistency check `{check}` failed (disagreement {defect:e})")]
    InternalConsistency { check: &'static str, defect: f64 },

    #[error("base surface is not minimal (max |H| = {max_mean_curvature:e})")]
    Minimality { max_mean_curvature: f64 },

    #[error("bending angle too close to zero at (u, v) = ({u}, {v})")]
    BendingAngleSingularity { u: f64, v: f64 },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Expr(#[from] ExprError),
}
