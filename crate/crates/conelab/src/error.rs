//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("structure constants not symmetric at (k={k}, i={i}, j={j}): |c_kij - c_kji| = {delta:.3e}")]
    AsymmetricStructure { k: usize, i: usize, j: usize, delta: f64 },

    #[error("identity axiom violated: max |e∘b - b| = {residual:.3e} over basis vectors")]
    IdentityViolation { residual: f64 },

    #[error("trace form is not symmetric positive definite (min eigenvalue ratio {min_ratio:.3e})")]
    TraceFormNotPositive { min_ratio: f64 },

    #[error("degenerate spectrum: {reason} (gap {gap:.3e})")]
    DegenerateSpectrum { reason: String, gap: f64 },

    #[error("{func} undefined on spectral value {value:.6e}")]
    FunctionDomain { func: &'static str, value: f64 },

    #[error("element is not in the cone interior (min spectral value {min_spectral:.3e})")]
    NotInterior { min_spectral: f64 },

    #[error("seminorm is not a norm: properness fails with kernel dimension {kernel_dim}")]
    PropernessViolated { kernel_dim: usize },

    #[error("singular linear map: {context}")]
    SingularMap { context: String },

    #[error("cone oracle unreliable: involution residual {residual:.3e} exceeds {tolerance:.1e}")]
    UnreliableOracle { residual: f64, tolerance: f64 },

    #[error("map is not additive on the cone: residual {residual:.3e}")]
    NotAdditive { residual: f64 },

    #[error("unknown catalog algebra `{name}`")]
    UnknownCatalog { name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("orientation is not valued in the derivation span: residual {residual:.3e}")]
    NotDerivationValued { residual: f64 },

    #[error("orientation basis hash mismatch: expected {expected:#018x}, got {got:#018x}")]
    BasisHashMismatch { expected: u64, got: u64 },

    #[error("oracle protocol error: {0}")]
    Protocol(String),

    #[error("extension spec invalid: {0}")]
    InvalidExtension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON input: {0}")]
    Json(#[from] serde_json::Error),
}
