use thiserror::Error;

/// Errors surfaced by this crate.
///
/// Strategy infeasibility (unbounded density ratios, support violations) is
/// deliberately *not* an error: it is reported through
/// [`UpdateReport::feasible`](crate::strategies::UpdateReport) so callers can
/// fall through to another strategy.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("quadrature did not converge: {message} (partial estimate {partial:e})")]
    Quadrature { message: String, partial: f64 },

    /// The two total-variation routes disagree: the absolute-difference
    /// quadrature and twice the partition-mass gap must match to `tol`.
    #[error("partition self-check failed: |d1 - 2(pi_q+ - pi_p+)| = {gap:e} exceeds {tol:e}")]
    PartitionCheck { gap: f64, tol: f64 },

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("weights are all zero")]
    AllZeroWeights,

    #[error("invalid sample set: {0}")]
    InvalidSampleSet(String),

    #[error("data outside the support of the {family} family")]
    DataOutsideSupport { family: String },

    #[error("invalid model catalog: {0}")]
    InvalidCatalog(String),

    #[error("fit failed for {family}: {message}")]
    Fit { family: String, message: String },

    #[error("invalid plate spec: {0}")]
    InvalidPlate(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
