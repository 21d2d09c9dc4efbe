use thiserror::Error;

/// Errors raised anywhere in the decomposition pipeline.
#[derive(Debug, Error)]
pub enum HgError {
    /// The request exceeds a configured evaluation limit.
    #[error("order {order} exceeds the configured maximum {max}")]
    Capability { order: usize, max: usize },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition on the input object failed (e.g. an unnormalized matrix).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A finite series ran past its term budget before completing.
    #[error("series exceeded its budget of {budget} terms (partial sum {partial_sum:e}, |terms| bound {bound:e})")]
    SeriesBudget {
        budget: usize,
        partial_sum: f64,
        bound: f64,
    },

    /// Node doubling changed the quadrature estimate by more than the tolerance.
    #[error("quadrature not converged: coarse {coarse:e}, fine {fine:e} (|diff| {diff:e} > {tolerance:e})")]
    QuadratureNotConverged {
        coarse: f64,
        fine: f64,
        diff: f64,
        tolerance: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("png: {0}")]
    Png(#[from] png::EncodingError),
}

impl HgError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HgError::Domain(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs or the filesystem.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            HgError::SeriesBudget { .. } | HgError::QuadratureNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, HgError>;
