use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("branch points of the discriminant collide (t = {t}, A = {a})")]
    DegenerateDiscriminant { t: f64, a: f64 },
    #[error("root continuation became ambiguous near z = {z}")]
    ContinuationAmbiguous { z: Complex64 },
    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    QuadratureNotConverged { estimate: f64, error: f64 },
    #[error("no sign change on the bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("trajectory left the search region at z = {z}")]
    TrajectoryEscaped { z: Complex64 },
    #[error("n = {n} is not in the index set for eps = {eps}")]
    NotInIndexSet { n: usize, eps: f64 },
    #[error("evaluation point coincides with a pole or cut: {0}")]
    Pole(String),
    #[error("unknown cut arm: {0}")]
    UnknownArm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
