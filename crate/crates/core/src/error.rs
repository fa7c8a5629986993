use thiserror::Error;

/// Errors raised by the solvers, projections and learners in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("value {value} exceeds the magnitude cap 2^40")]
    Overflow { value: f64 },

    #[error("initial point is outside the effective domain")]
    InfeasibleStart,

    #[error("descent did not terminate within {cap} iterations; the local oracle is likely broken")]
    Divergence { cap: usize },

    #[error("objective stays linear along the direction beyond the step cap {cap}")]
    UnboundedDirection { cap: i64 },

    #[error("{what} exceeds the enumeration capacity ({size} > {limit})")]
    Capacity { what: &'static str, size: u128, limit: u128 },

    #[error("constraint system is empty (negative cycle in the constraint graph)")]
    EmptySet,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("dual point is infeasible: edge ({0}, {1}) has negative slack")]
    InfeasibleDual(usize, usize),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("instance has no perfect matching")]
    NoPerfectMatching,

    #[error("matroids have no common base")]
    NoCommonBase,

    #[error("function is not discretely convex: {0}")]
    NotConvex(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
