use thiserror::Error;

use crate::symmetry::Family;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("local dimension must be at least 2 (got {0})")]
    DimensionTooSmall(usize),

    #[error("the Bell family is only defined for local dimension 2 (got {0})")]
    BellDimension(usize),

    #[error("symmetry kind mismatch: {expected} vs {got}")]
    KindMismatch { expected: String, got: String },

    #[error("partial-transpose maps cannot be composed: {0} does not feed {1}")]
    MapTagMismatch(String, String),

    #[error("matrix is not Hermitian (entry ({row}, {col}))")]
    NotHermitian { row: usize, col: usize },

    #[error("factor is not positive semidefinite")]
    NotPsd,

    #[error("coefficient vector of length {got} does not fit family {family:?} (needs {expected})")]
    CoeffLength {
        family: Family,
        expected: usize,
        got: usize,
    },

    #[error("POVM needs at least one outcome")]
    NoOutcomes,

    #[error("POVM elements do not sum to the identity (component {component})")]
    Incomplete { component: usize },

    #[error("target is not feasible: {0}")]
    Infeasible(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is unbounded or has a lineality space")]
    UnboundedPolytope,

    #[error("unknown extremum identifier: {0}")]
    UnknownExtremum(String),

    #[error("integer overflow in exact enumeration")]
    Overflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
