use thiserror::Error;

use crate::models::ModelKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixed models: {left} vs {right}")]
    MixedModels { left: ModelKind, right: ModelKind },

    #[error("vertex {vertex} lies outside the materialized ball of radius {radius}")]
    NotInBall { vertex: String, radius: u32 },

    #[error("sample has {got} points, need at least {need}")]
    InsufficientSample { got: usize, need: usize },

    #[error("isometry is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),

    #[error("no N <= {n_max} passes the north-south test")]
    NoPassingN { n_max: u32 },

    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_same(left: ModelKind, right: ModelKind) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::MixedModels { left, right })
    }
}
