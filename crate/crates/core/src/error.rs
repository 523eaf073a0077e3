use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("loss `{0}` has no flat region and cannot be used for screening")]
    NotSafeLoss(&'static str),

    #[error("loss `{loss}` is a {loss_task} loss but the dataset is a {data_task} task")]
    TaskMismatch {
        loss: &'static str,
        loss_task: &'static str,
        data_task: &'static str,
    },

    #[error("ellipsoid lost positive definiteness (g^T E g = {0:e})")]
    NotPositiveDefinite(f64),

    #[error("grid oracle minimizer hit the grid boundary at {0}; widen the grid")]
    GridBoundary(f64),

    #[error("gram matrix is not positive semidefinite (Rayleigh quotient {0:e})")]
    NotPsd(f64),

    #[error("duality gap is infinite; dual candidate is infeasible")]
    InfeasibleDual,

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
