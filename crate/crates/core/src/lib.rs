//! Pointwise geometry of regular Hamiltonians on cotangent bundles.

#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod fields;
pub mod geometry;
pub mod jets;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};
pub use jets::PhasePoint;
