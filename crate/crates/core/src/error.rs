use std::path::Path;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("bandwidth {m} outside 1..={n}")]
    BandwidthOutOfRange { m: usize, n: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semi-definite: eigenvalue {0:e}")]
    NotPositiveSemidefinite(f64),

    #[error("factorization did not converge")]
    NoConvergence,

    #[error("plans were built from different graph pairs")]
    PlanMismatch,

    #[error("reference signal has zero norm")]
    ZeroSignal,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    Dataset { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn dataset(path: &Path, message: impl Into<String>) -> Self {
        Error::Dataset {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite
                | Error::NotSymmetric { .. }
                | Error::NotPositiveSemidefinite(_)
                | Error::NoConvergence
        )
    }

    /// Process exit status for the CLI: 2 for input errors, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }

    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::LengthMismatch { .. } | Error::ShapeMismatch { .. } => "dimension_mismatch",
            Error::BandwidthOutOfRange { .. } => "bandwidth_out_of_range",
            Error::NonFinite => "non_finite",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::NotPositiveSemidefinite(_) => "not_psd",
            Error::NoConvergence => "no_convergence",
            Error::PlanMismatch => "plan_mismatch",
            Error::ZeroSignal => "zero_signal",
            Error::Parse { .. } => "parse_error",
            Error::Dataset { .. } => "dataset_error",
            Error::Io { .. } => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}
