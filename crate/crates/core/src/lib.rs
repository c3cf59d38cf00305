//! Exact curvature identities of (para-)Hermitian geometry and constructive
//! realization of Kaehler and para-Kaehler curvature models by polynomial
//! metrics, including constant-scalar-curvature potentials.
//!
//! All arithmetic is exact over the rationals.

// Error carries exact witness values; results are not on hot paths.
#![allow(clippy::result_large_err)]

pub mod curvature;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod potential;
pub mod rational;
pub mod realization;
pub mod sampling;
pub mod structure;

pub use error::{Error, Result};
pub use rational::Rational;
