//! Manifest-driven reports on the geometry, symmetries and flow of a
//! Hamiltonian.

#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod manifest;
pub mod report;
pub mod selftest;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("regularity error: {0}")]
    Regularity(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Manifest(_) | CliError::Io(_) => 2,
            CliError::Regularity(_) => 3,
        }
    }

    /// Attaches `context` to a core error; singular metrics are regularity
    /// errors, everything else is blamed on the input.
    pub fn from_core(context: &str, e: hamsym_core::Error) -> CliError {
        match e {
            hamsym_core::Error::Singular { .. } => CliError::Regularity(format!("{context}: {e}")),
            _ => CliError::Manifest(format!("{context}: {e}")),
        }
    }
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
