use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("negative radius {0}")]
    NegativeRadius(f64),

    #[error("basis is linearly dependent: singular value {singular_value:.3e} below threshold {threshold:.3e}")]
    RankDeficient { singular_value: f64, threshold: f64 },

    #[error("invalid unit: {0}")]
    InvalidUnit(String),

    #[error("matrix is not a member of the amplified space (residual {residual:.3e})")]
    NotAMember { residual: f64 },

    #[error("matrix level must be at least 1")]
    ZeroLevel,

    #[error("accretive sampling exhausted after {cap} attempts")]
    SamplingExhausted { cap: usize },

    #[error("space has no nonzero self-adjoint elements at level {level}")]
    NoSelfAdjointPart { level: usize },

    #[error("feasibility undecided at t = {t:.6e} (last residual {residual:.3e})")]
    Indeterminate { t: f64, residual: f64 },

    #[error("element does not belong to this space: {0}")]
    SpaceMismatch(String),

    #[error("operation requires a diagonal space")]
    NotDiagonal,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}
