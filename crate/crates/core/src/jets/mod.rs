//! Truncated multivariate Taylor arithmetic over phase-space coordinates.

mod basis;
mod fd;
mod jet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr};

pub use fd::{fd_oracle, fd_step, FdError};
pub use jet::{Jet, JetError};

/// Highest supported jet order. Curvature needs derivatives of the connection,
/// which already contains second derivatives of the inverse metric.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointError {
    #[error("a phase point needs at least one coordinate pair")]
    Empty,
    #[error("positions have {x} entries but momenta have {p}")]
    LengthMismatch { x: usize, p: usize },
    #[error("coordinate {slot} is not finite")]
    NonFinite { slot: usize },
}

/// A point `(x, p)` of the cotangent bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    x: Vec<f64>,
    p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<PhasePoint, PointError> {
        if x.len() != p.len() {
            return Err(PointError::LengthMismatch {
                x: x.len(),
                p: p.len(),
            });
        }
        if x.is_empty() {
            return Err(PointError::Empty);
        }
        if let Some(slot) = x.iter().chain(&p).position(|v| !v.is_finite()) {
            return Err(PointError::NonFinite { slot });
        }
        Ok(PhasePoint { x, p })
    }

    /// Splits `(x1..xn, p1..pn)`.
    pub fn from_coords(coords: &[f64]) -> Result<PhasePoint, PointError> {
        if !coords.len().is_multiple_of(2) {
            return Err(PointError::LengthMismatch {
                x: coords.len().div_ceil(2),
                p: coords.len() / 2,
            });
        }
        let (x, p) = coords.split_at(coords.len() / 2);
        PhasePoint::new(x.to_vec(), p.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.p).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("requested jet order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooHigh(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// All partial derivatives of `expr` at `point` up to `order`.
pub fn jet_lift(expr: &Expr, point: &PhasePoint, order: usize) -> Result<Jet, LiftError> {
    if order > MAX_ORDER {
        return Err(LiftError::OrderTooHigh(order));
    }
    let vars = Jet::seed(&point.coords(), order);
    Ok(expr.eval(&vars)?)
}
