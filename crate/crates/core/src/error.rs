use thiserror::Error;

use crate::paramsolve::SolveReport;



pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("consecutive vertices {0} and {1} coincide")]
    DegenerateSide(usize, usize),
    #[error("point lies on the polygon")]
    PointOnCurve,
    #[error("quadrature exponent {0} is not greater than -1")]
    InvalidExponent(f64),
    #[error("quadrature order must be positive")]
    InvalidOrder,
    #[error("integration path passes through prevertex {0}")]
    PathThroughSingularity(usize),
    #[error("point {0} is outside the closed upper half-plane")]
    OutsideHalfPlane(num_complex::Complex64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("exponents sum to {sum}, expected {expected}")]
    ExponentSum { sum: f64, expected: f64 },
    #[error("exponent {index} = {value} outside the admissible range")]
    ExponentRange { index: usize, value: f64 },
    #[error("expected {expected} exponents, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("prevertices must be strictly increasing")]
    NotIncreasing,
    #[error("prevertices are not normalized (z_1 = -1, z_2 = 0)")]
    NotNormalized,
    #[error("exponents lie on the boundary of the admissible polytope")]
    OnBoundary,
    #[error("constant A must be nonzero")]
    ZeroScale,
    #[error("interior angle {index} is {got}, expected {expected}")]
    AngleMismatch { index: usize, got: f64, expected: f64 },
    #[error("polygon fails the immersion conditions: {0}")]
    NotImmersedInput(String),


    #[error("parameter solve did not converge (residual {})", .0.final_residual_norm)]
    SolveFailed(Box<SolveReport>),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-domain input, as opposed
    /// to numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence(_)
                | Error::PathThroughSingularity(_)
                | Error::AngleMismatch { .. }
                | Error::SolveFailed(_)
        )
    }
}
