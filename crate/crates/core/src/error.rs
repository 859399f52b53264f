use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(f64),

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("{what} must be at least {min}, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("degenerate sample: weighted variance of the order statistics is zero")]
    DegenerateSample,

    #[error("empirical distribution is empty")]
    EmptyDistribution,

    #[error("critical values are not strictly increasing in the level (got {0:?}); increase the replication count")]
    NonMonotoneTable(Vec<f64>),

    #[error("invalid levels: {0}")]
    InvalidLevels(String),

    #[error("critical-value table does not match: {0}")]
    TableMismatch(String),

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),

    #[error("line {line}: cannot parse `{text}` as a real number")]
    Parse { line: usize, text: String },

    #[error("malformed table file: {0}")]
    MalformedTable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
