use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants are grouped so the CLI can map them onto its exit-code contract
/// (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown catalog entry `{name}` ({kind})")]
    UnknownCatalog { kind: &'static str, name: String },

    #[error("degenerate Jacobian at {point:?}: |det| = {det:e}")]
    DegenerateJacobian { point: Vec<f64>, det: f64 },

    #[error("inverse map failed at u = {u:?}: {detail}")]
    InverseFailure { u: Vec<f64>, detail: String },

    #[error("weight too small at node {index}: |w| = {modulus:e}")]
    VanishingWeight { index: usize, modulus: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("pole proximity: {0}")]
    PoleProximity(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("no convergence in {routine}: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("non-negligible imaginary residue {residue:e} in {context}")]
    ImaginaryResidue { context: &'static str, residue: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 validation failure, 2 configuration
    /// error, 3 numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            Error::Config(_) | Error::UnknownCatalog { .. } | Error::InvalidParameter(_) => 2,
            Error::NonConvergence { .. } | Error::Divergence(_) => 3,
            _ => 3,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn no_convergence(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            routine,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
