//! Numerical library for approximating contractive matrix-valued holomorphic
//! functions on the disc and bidisc by rational inner functions, via explicit
//! finite unitary dilations of contractive system matrices.
//!
//! On top of the dilation machinery sit four pipelines:
//! convex-hull decomposition into rational inner atoms, the indefinite-metric
//! (Potapov-Ginzburg / Krein-Langer) constructions, and the symmetrized-bidisc
//! and tetrablock maps driven by 2x2 inner approximants.

pub mod dilation;
pub mod domains;
pub mod error;
pub mod hull;
pub mod indefinite;
pub mod io;
pub mod matrix;
pub mod potapov;
pub mod realization;

pub use error::{Error, Result};
pub use matrix::{BidiscSplit, C64, CMat, CircleGrid, Colligation, DiscFn, MatrixPolynomial, TorusGrid};
