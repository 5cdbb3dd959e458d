use thiserror::Error;

use crate::signed_log::SignedLogValue;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {routine}: {detail}")]
    Domain {
        routine: &'static str,
        detail: String,
    },

    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    /// The node budget ran out before the requested tolerance was reached.
    /// `partial` is the best estimate obtained.
    #[error("quadrature for {context} stopped at estimated relative error {est_rel_error:e} (requested {rel_tol:e})")]
    Quadrature {
        context: String,
        partial: SignedLogValue,
        est_rel_error: f64,
        rel_tol: f64,
    },

    #[error("invalid moment sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid q function: {0}")]
    InvalidQ(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("while computing index {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            routine,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics themselves (non-convergence,
    /// exhausted quadrature budget), as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::Quadrature { .. } => true,
            Error::AtIndex { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
