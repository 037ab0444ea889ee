use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input left the documented validity region of a model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates its invariants (non-positive mass, degenerate
    /// geometry, singular reduced mass matrix, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A quantity that must be nonzero for normalization vanished.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Trajectory propagation aborted; the failing time is attached.
    #[error("propagation failed at t = {time:.4} s: {reason}")]
    Propagation { time: f64, reason: String },

    /// Scenario / sweep / coefficient-table parse failure with location.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Two result sets that must share an index (e.g. water-exit angles)
    /// do not line up.
    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn singularity(msg: impl Into<String>) -> Self {
        Error::Singularity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
