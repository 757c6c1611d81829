//! Truncated Fock-space simulation of the two-crystal induced-coherence
//! interferometer.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod operator;
pub mod quadrature;

pub use dynamics::{CrystalId, CrystalParams, PerturbativeCoefficients};
pub use error::{Result, ZwmError};
pub use fock::{FockBasisVector, Mode, ModeRegistry, StateVector};
pub use interferometer::{Cutoffs, FringeFit, Pump, RatioReport, ZwmConfig, ZwmOutput};
pub use num_complex::Complex64;
pub use operator::{Ladder, LadderFactor, OperatorSum, OperatorTerm};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
