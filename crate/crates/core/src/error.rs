use thiserror::Error;

/// Errors raised by the numerical routines and the command front-ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("component index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("fitted decay rate is not positive (beta = {beta})")]
    NegativeBeta { beta: f64 },

    #[error("no geometric decay: fitted delta = {delta}")]
    NoGeometricDecay { delta: f64 },

    #[error("expansion carries no norm certificate")]
    Uncertified,

    #[error("kernel is singular at z = 0")]
    Singular,

    #[error("grid too coarse: error indicator {indicator:e} exceeds {limit:e}")]
    GridTooCoarse { indicator: f64, limit: f64 },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable upper-case code used in reports and CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::SingularSystem(_) => "SINGULAR_SYSTEM",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::InsufficientData(_) => "INSUFFICIENT_DATA",
            Error::NegativeBeta { .. } => "NEGATIVE_BETA",
            Error::NoGeometricDecay { .. } => "NO_GEOMETRIC_DECAY",
            Error::Uncertified => "UNCERTIFIED",
            Error::Singular => "SINGULAR",
            Error::GridTooCoarse { .. } => "GRID_TOO_COARSE",
            Error::Evaluation(_) => "EVALUATION",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::Parse(_) => "PARSE",
            Error::Io(_) => "IO",
            Error::Json(_) => "JSON",
            Error::Csv(_) => "CSV",
        }
    }

    /// True for failures of a mathematical check (as opposed to bad input or I/O).
    pub fn is_math_failure(&self) -> bool {
        matches!(
            self,
            Error::NegativeBeta { .. }
                | Error::NoGeometricDecay { .. }
                | Error::SingularSystem(_)
                | Error::GridTooCoarse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
