use thiserror::Error;

use crate::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the exact geometry toolkit.
///
/// Index quadruples carried by variants are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension must be even and at least 4, got {0}")]
    BadDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("entries contradict the curvature symmetries at {at:?}: {existing} vs {requested}")]
    SymmetryConflict {
        at: [usize; 4],
        existing: Rational,
        requested: Rational,
    },
    #[error("first Bianchi identity fails at {at:?} (cyclic sum {value})")]
    BianchiViolation { at: [usize; 4], value: Rational },
    #[error("Gram matrix of the basis is singular under the given bilinear form")]
    DegenerateGram,
    #[error("symmetric form is not in the eigenspace required by the structure")]
    BadThetaSymmetry,
    #[error("Theta tensor violates its symmetries at {at:?}")]
    BadTheta { at: [usize; 4] },
    #[error("model does not satisfy the Kaehler identity (first violation at {at:?})")]
    NotKaehler { at: [usize; 4] },
    #[error("closed-form projection is only defined for the complex kind")]
    WrongKind,
    #[error("exact linear system has no solution: {0}")]
    NoSolution(String),
    #[error("invalid polynomial metric: {0}")]
    BadMetric(String),
    #[error("metric is singular at the evaluation point")]
    SingularMetric,
    #[error("series has zero constant term and is not invertible")]
    NotAUnit,
    #[error("Theta is not in the kernel of the linearized Kaehler constraint")]
    NotInKernel,
    #[error("leading coefficient of the top u_m derivative vanishes")]
    LeadingCoefficientDegenerate,
    #[error("truncation degree must be at least 4, got {0}")]
    BadDegree(u32),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("parse error: {0}")]
    Parse(String),
}
