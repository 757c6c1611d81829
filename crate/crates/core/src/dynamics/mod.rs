//! Down-conversion dynamics of a single crystal.
//!
//! Units: `hbar = 1` throughout, so `g_prime` is an angular frequency and
//! `g_prime * tau` is dimensionless.

mod coefficients;
mod dyson;
mod exact;
pub mod expm;
mod hamiltonian;

pub use coefficients::{analytic_coefficients, g_tilde_sq_closed_form, sinc, PerturbativeCoefficients};
pub use dyson::{dyson_propagator, time_ordered_integral, MAX_DYSON_ORDER};
pub use exact::{exact_propagator, exact_propagator_with_limit, unitarity_defect, DEFAULT_DENSE_LIMIT};
pub use hamiltonian::{build_hamiltonian, pair_operator};

use num_complex::Complex64;

use crate::error::{Result, ZwmError};
use crate::fock::Mode;

/// `|g'| tau` above which the perturbative propagator is flagged.
pub const PERTURBATIVE_GAIN_WARNING: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrystalId {
    One,
    Two,
}

impl CrystalId {
    pub fn pump(self) -> Mode {
        match self {
            CrystalId::One => Mode::Pump1,
            CrystalId::Two => Mode::Pump2,
        }
    }

    pub fn signal(self) -> Mode {
        match self {
            CrystalId::One => Mode::Signal1,
            CrystalId::Two => Mode::Signal2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalParams {
    /// Interaction strength.
    pub g_prime: Complex64,
    /// Interaction time.
    pub tau: f64,
    /// Detuning `omega_S + omega_I - omega_P`.
    pub delta_omega: f64,
    pub crystal: CrystalId,
    /// Phase picked up by the idler between the crystals; the idler
    /// annihilator at this crystal is `a_I e^{i idler_phase}`. Zero for the
    /// first crystal.
    pub idler_phase: f64,
}

impl CrystalParams {
    pub fn new(g_prime: Complex64, tau: f64, delta_omega: f64, crystal: CrystalId) -> Result<Self> {
        let params = Self {
            g_prime,
            tau,
            delta_omega,
            crystal,
            idler_phase: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(ZwmError::Config(format!(
                "interaction time must be positive, got {}",
                self.tau
            )));
        }
        if !self.delta_omega.is_finite() || !self.g_prime.re.is_finite() || !self.g_prime.im.is_finite() {
            return Err(ZwmError::Config("crystal parameters must be finite".into()));
        }
        if !self.idler_phase.is_finite() {
            return Err(ZwmError::Config("idler phase must be finite".into()));
        }
        Ok(())
    }

    pub fn for_crystal(self, crystal: CrystalId, idler_phase: f64) -> Self {
        Self {
            crystal,
            idler_phase,
            ..self
        }
    }

    /// Dimensionless gain `|g'| tau`.
    pub fn gain(&self) -> f64 {
        self.g_prime.norm() * self.tau
    }

    pub fn is_perturbative(&self) -> bool {
        self.gain() <= PERTURBATIVE_GAIN_WARNING
    }
}
