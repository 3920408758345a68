use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::IntVec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors and matrices must have at least one entry")]
    Empty,

    #[error("vectors are not part of a Z-basis (Smith diagonal {diagonal:?})")]
    NotExtendable { diagonal: Vec<BigInt> },

    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: BigInt },

    #[error("the zero vector does not span a ray")]
    ZeroRay,

    #[error("ray {0} is listed twice")]
    DuplicateRay(IntVec),

    #[error("cone is not strongly convex")]
    NotStronglyConvex,

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("cone is not simplicial: {rays} rays span a {span}-dimensional subspace")]
    NotSimplicial { rays: usize, span: usize },

    #[error("cone is not smooth (Smith diagonal {diagonal:?})")]
    NotSmooth { diagonal: Vec<BigInt> },

    #[error("cone is not full-dimensional: {rays} rays in a rank {rank} lattice")]
    NotFullDimensional { rays: usize, rank: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("fan is not {0}")]
    MissingFanProperty(&'static str),

    #[error("invalid cone parameters a={a}, b={b}: need 1 <= a <= b and gcd(a, b) = 1")]
    InvalidSurfaceParameters { a: i64, b: i64 },

    #[error("quotient basis has rank {computed}, expected {expected}")]
    RankMismatch { computed: usize, expected: i64 },

    #[error("{theorem} needs {requirement}")]
    HypothesisViolation {
        theorem: &'static str,
        requirement: &'static str,
    },

    #[error("product formula is only available in degrees 0, 1, 2 (requested {0})")]
    DegreeOutOfRange(u32),

    #[error("invalid field model: {0}")]
    InvalidField(String),
}
