use thiserror::Error;

/// Errors raised by the solvers and their supporting machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate element geometry: {0}")]
    Degenerate(String),

    #[error("non-finite contribution from element {element}: {detail}")]
    Assembly { element: usize, detail: String },

    #[error("matrix is singular to working precision (column {column}, best pivot {pivot:e}, largest entry {scale:e})")]
    Singular { column: usize, pivot: f64, scale: f64 },

    #[error("linear solve residual check failed: relative residual {relative:e} exceeds {limit:e}")]
    Residual { relative: f64, limit: f64 },

    #[error("dual-to-primal matrix is singular at t = {t} (det = {det:e})")]
    SingularDtp { t: f64, det: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (increments: {history:?})")]
    NonConvergence { iterations: usize, history: Vec<f64> },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    #[error("undefined measure: {0}")]
    Undefined(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_stage(self, stage: usize) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, unwrapping stage context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
