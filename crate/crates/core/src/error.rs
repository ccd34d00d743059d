//! Error type shared by every module of the crate.

use crate::matrix::C64;

/// Errors raised by constructions, evaluators and pipelines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("resolvent I - zD numerically singular at z = {z} (condition estimate {cond:.3e})")]
    SingularResolvent { z: C64, cond: f64 },

    #[error("matrix is not a contraction (operator norm {norm:.6})")]
    NotContractive { norm: f64 },

    #[error("kernel Gram matrix has eigenvalue {min_eigenvalue:.3e} < -1e-6; input is not contractive on the disc")]
    NotContractiveInput { min_eigenvalue: f64 },

    #[error("dilation depth m = {m} is below the minimum of 3")]
    DepthTooSmall { m: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("radius {r} outside the admissible range")]
    InvalidRadius { r: f64 },

    #[error("evaluation hit a pole at z = {z}")]
    PoleHit { z: C64 },

    #[error("kernel denominator 1 - z*conj(w) degenerate (|.| = {value:.3e})")]
    DegenerateDenominator { value: f64 },

    #[error("function is not inner on the circle (defect {defect:.3e} > tol {tol:.3e})")]
    NotInner { defect: f64, tol: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("block P + QF (or its mirror) numerically singular (condition estimate {cond:.3e})")]
    SingularBlock { cond: f64 },

    #[error("q x q corner of the inner approximant is degenerate (max sampled |det| = {max_abs_det:.3e}) after {retries} retries")]
    CornerDegenerate { max_abs_det: f64, retries: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
