use thiserror::Error;

use crate::fock::Mode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZwmError {
    /// The requested space, cutoff or matrix does not fit the configured limits.
    #[error("sizing error: {0}")]
    Sizing(String),

    #[error("mode {0} is not part of the registry")]
    UnknownMode(Mode),

    #[error("mode {0} appears more than once in the registry")]
    DuplicateMode(Mode),

    #[error("states or operators were built on different mode registries")]
    RegistryMismatch,

    #[error("occupation {occupation} of mode {mode} exceeds its cutoff {cutoff}")]
    OccupationOutOfRange { mode: Mode, occupation: u32, cutoff: u32 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("Dyson order {0} is not supported (expected 1, 2 or 3)")]
    UnsupportedOrder(u32),

    #[error("truncation loss {loss:.3e} exceeds the bound {bound:.3e}; increase the cutoffs")]
    TruncationLoss { loss: f64, bound: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, ZwmError>;
