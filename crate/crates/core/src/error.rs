use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    EmptyDimension,

    #[error("index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("entry ({row}, {col}) lies outside the declared band")]
    OutsideBand { row: usize, col: usize },

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("no sign change of the smallest eigenvalue on [{lower}, {upper}]")]
    NoSignChange { lower: f64, upper: f64 },

    #[error("Dyson map is singular")]
    SingularMap,

    #[error("integrand is not finite at node {node} (x = {x})")]
    NonFinite { node: usize, x: f64 },

    #[error("metric solvers disagree: recurrence gives {recurrence}, nullspace gives {nullspace}")]
    SolverMismatch { recurrence: usize, nullspace: usize },

    #[error("basis element {index} leaves the Dieudonne nullspace (defect {defect:e})")]
    SpanMismatch { index: usize, defect: f64 },

    #[error("quadratic form is negative ({value:e}); metric is not positive")]
    IndefiniteNorm { value: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("lattice is empty")]
    EmptyLattice,
}
