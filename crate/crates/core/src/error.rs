use thiserror::Error;

use crate::expr::EvalError;
use crate::jets::{JetError, LiftError, PointError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{what} is singular at this point (reciprocal condition {rcond:e})")]
    Singular { what: &'static str, rcond: f64 },
    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("vector field is not horizontal here (residual {residual:e}, tolerance {tol:e})")]
    NotHorizontal { residual: f64, tol: f64 },
    #[error("{0}")]
    InvalidArgument(String),
}

impl From<LiftError> for Error {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::Eval(e) => Error::Eval(e),
            LiftError::OrderTooHigh(order) => {
                Error::InvalidArgument(format!("jet order {order} is not supported"))
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
