use crate::ous::ModelTag;

/// Errors raised by model operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model mismatch: {left} vs {right}")]
    ModelMismatch { left: ModelTag, right: ModelTag },

    #[error("operation requires a {expected} model, got {found}")]
    WrongModel { expected: &'static str, found: ModelTag },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("not a projection (residual {residual:e})")]
    NotProjection { residual: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("ambiguous rank decision: singular value {value:e} is too close to cutoff {cutoff:e}")]
    RankAmbiguous { value: f64, cutoff: f64 },

    #[error("duality map check failed for {witness:?} (residual {residual:e})")]
    DualityMap { residual: f64, witness: Vec<f64> },

    #[error("function `{name}` is undefined at spectral point {at}")]
    FunctionDomain { name: String, at: f64 },

    #[error("function `{0}` has no declared preimage rule")]
    PreimageUndeclared(String),

    #[error("{clusters} spectral clusters exceed the combinatorial cap of {cap}")]
    TooManyClusters { clusters: usize, cap: usize },

    #[error("generators are not pairwise compatible")]
    Incompatible,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
