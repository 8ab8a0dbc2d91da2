use crate::spectral::Defect;
use thiserror::Error;

/// Broad failure category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Degeneracy,
    Convergence,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid loop specification: {0}")]
    InvalidSpec(String),
    #[error("degenerate point ({defect:?}): {detail}")]
    DegeneratePoint { defect: Defect, detail: String },
    #[error("degeneracy locus collapses to a point when |Gamma| = 0")]
    LocusIsPoint,
    #[error(
        "loop comes within {distance:.3e} of the degeneracy circle (R^2 = |Gamma|^2/4, R.Gamma = 0) at t = {parameter:.6}; floor is {floor:.3e}"
    )]
    LoopTooClose { parameter: f64, distance: f64, floor: f64 },
    #[error("winding number undefined: {0}")]
    WindingUndefined(String),
    #[error("ambiguous crossing of the spanning disk at t = {parameter:.6}; refine N")]
    AmbiguousCrossing { parameter: f64 },
    #[error("near degeneracy: |eps| = {eps_abs:.3e} below floor {floor:.3e}")]
    NearDegeneracy { eps_abs: f64, floor: f64 },
    #[error("formula singular: {0}")]
    FormulaSingular(String),
    #[error("wrong path class: {0}")]
    WrongClass(String),
    #[error("sphere touches the degeneracy circle (radius {radius}, circle radius {circle_radius})")]
    SphereTouchesLocus { radius: f64, circle_radius: f64 },
    #[error("refine resolution: {0}")]
    Refine(String),
    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),
    #[error("adiabaticity violated: leakage {leakage:.3e} >= {threshold}")]
    AdiabaticityViolation { leakage: f64, threshold: f64 },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidArgument(_) | InvalidSpec(_) | WrongClass(_) | SphereTouchesLocus { .. }
            | LocusIsPoint | FormulaSingular(_) | WindingUndefined(_) => ErrorCategory::Validation,
            DegeneratePoint { .. } | LoopTooClose { .. } | NearDegeneracy { .. } => {
                ErrorCategory::Degeneracy
            }
            AmbiguousCrossing { .. } | Refine(_) | NoConvergence(_)
            | AdiabaticityViolation { .. } => ErrorCategory::Convergence,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
