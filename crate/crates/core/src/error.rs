use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid model: {field}: {reason}")]
    InvalidModel { field: &'static str, reason: String },

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("{lambda} is not an eigenvalue (nearest at distance {distance:.3e})")]
    NotAnEigenvalue { lambda: Complex64, distance: f64 },

    #[error("defective eigenvalue {eigenvalue}: algebraic multiplicity {algebraic}, geometric {geometric}")]
    Deficient {
        eigenvalue: Complex64,
        algebraic: usize,
        geometric: usize,
    },

    #[error("energy {energy} hits the bulk eigenvalue {delta}")]
    ResolventPole { energy: Complex64, delta: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("propagation stalled with unresolved entries {unresolved:?}")]
    NotRecurrentlySolvable { unresolved: Vec<(usize, usize)> },

    #[error("bracket ({lo}, {hi}) does not straddle a transition")]
    BracketInvalid { lo: f64, hi: f64 },
}
