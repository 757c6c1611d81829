//! The two-crystal cascade: pump preparation, `U2 * filter * U1`, and the
//! observables read off the output state.
//!
//! Mode order in every registry built here is `P1, P2, S1, S2, I` followed by
//! the loss mode `L` when the idler filter is partially transmitting.

mod filter;
mod fringe;
mod observables;
mod ratio;

pub use filter::apply_idler_filter;
pub use fringe::{fit_fringe, fringe_scan, FringeFit, FringePoint};
pub use observables::{coincidence_rate, detection_rate, detector_field, phi_in};
pub use ratio::{match_single_photon, nl2_nl1_ratio, RatioReport, RATIO_MATCH_TOL};

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{analytic_coefficients, dyson_propagator, CrystalId, CrystalParams, MAX_DYSON_ORDER};
use crate::error::{Result, ZwmError};
use crate::fock::{coherent_amplitudes, coherent_cutoff, Mode, ModeRegistry, StateVector, DEFAULT_TRUNCATION_BOUND};

/// Relative tolerance for treating the two coherent pump intensities as equal.
const EQUAL_PUMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pump {
    /// `(|1_P1> + e^{i phi_p} |1_P2>) / sqrt(2)`.
    SinglePhoton { phi_p: f64 },
    /// `|alpha1>_P1 |alpha2>_P2`.
    Coherent { alpha1: Complex64, alpha2: Complex64 },
}

impl Pump {
    /// Relative pump phase `phi_P`.
    pub fn phase(&self) -> f64 {
        match *self {
            Pump::SinglePhoton { phi_p } => phi_p,
            Pump::Coherent { alpha1, alpha2 } => {
                if alpha1.norm() == 0.0 || alpha2.norm() == 0.0 {
                    0.0
                } else {
                    alpha2.arg() - alpha1.arg()
                }
            }
        }
    }

    pub fn is_single_photon(&self) -> bool {
        matches!(self, Pump::SinglePhoton { .. })
    }
}

/// Per-mode occupation cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoffs {
    pub pump1: u32,
    pub pump2: u32,
    pub signal1: u32,
    pub signal2: u32,
    pub idler: u32,
    /// Loss mode behind the idler filter; required when the filter is not
    /// fully transmitting.
    pub loss: Option<u32>,
}

impl Cutoffs {
    pub fn scaled(&self, factor: u32) -> Self {
        Self {
            pump1: self.pump1 * factor,
            pump2: self.pump2 * factor,
            signal1: self.signal1 * factor,
            signal2: self.signal2 * factor,
            idler: self.idler * factor,
            loss: self.loss.map(|c| c * factor),
        }
    }

    pub fn registry(&self) -> Result<ModeRegistry> {
        let mut entries = vec![
            (Mode::Pump1, self.pump1),
            (Mode::Pump2, self.pump2),
            (Mode::Signal1, self.signal1),
            (Mode::Signal2, self.signal2),
            (Mode::Idler, self.idler),
        ];
        if let Some(loss) = self.loss {
            entries.push((Mode::Loss, loss));
        }
        ModeRegistry::new(entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZwmConfig {
    pub pump: Pump,
    /// Shared by both crystals; `crystal` and `idler_phase` are overridden
    /// per crystal.
    pub crystal: CrystalParams,
    /// Idler phase between the crystals.
    pub phi_i: f64,
    /// Signal path phase at the detector.
    pub phi_s: f64,
    /// Amplitude transmission of the idler filter, `0` blocked, `1` aligned.
    pub idler_transmission: f64,
    /// Dyson order of each crystal propagator.
    pub order: u32,
    /// `None` selects cutoffs from the pump and order.
    pub cutoffs: Option<Cutoffs>,
    /// Largest truncation loss accepted before the run fails.
    pub truncation_bound: f64,
    pub allow_unequal_pumps: bool,
}

impl ZwmConfig {
    pub fn new(pump: Pump, g_prime: Complex64, tau: f64, delta_omega: f64) -> Result<Self> {
        let config = Self {
            pump,
            crystal: CrystalParams::new(g_prime, tau, delta_omega, CrystalId::One)?,
            phi_i: 0.0,
            phi_s: 0.0,
            idler_transmission: 1.0,
            order: 2,
            cutoffs: None,
            truncation_bound: DEFAULT_TRUNCATION_BOUND,
            allow_unequal_pumps: false,
        };
        config.validate()?;
        Ok(config)
    }

    /// Phase-matched single-photon pump with `tau = 1`.
    pub fn single_photon(g_prime: f64, phi_p: f64) -> Result<Self> {
        Self::new(Pump::SinglePhoton { phi_p }, Complex64::new(g_prime, 0.0), 1.0, 0.0)
    }

    /// Phase-matched coherent pump `alpha1 = alpha2 = alpha` with `tau = 1`.
    pub fn coherent(g_prime: f64, alpha: Complex64) -> Result<Self> {
        Self::new(
            Pump::Coherent {
                alpha1: alpha,
                alpha2: alpha,
            },
            Complex64::new(g_prime, 0.0),
            1.0,
            0.0,
        )
    }

    pub fn with_phases(mut self, phi_i: f64, phi_s: f64) -> Self {
        self.phi_i = phi_i;
        self.phi_s = phi_s;
        self
    }

    pub fn with_transmission(mut self, t: f64) -> Self {
        self.idler_transmission = t;
        self
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self
    }

    pub fn with_cutoffs(mut self, cutoffs: Cutoffs) -> Self {
        self.cutoffs = Some(cutoffs);
        self
    }

    pub fn with_g_prime(mut self, g_prime: Complex64) -> Self {
        self.crystal.g_prime = g_prime;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.crystal.validate()?;
        let t = self.idler_transmission;
        if !(0.0..=1.0).contains(&t) {
            return Err(ZwmError::Config(format!(
                "idler transmission must lie in [0, 1], got {t}"
            )));
        }
        if self.order == 0 || self.order > MAX_DYSON_ORDER {
            return Err(ZwmError::UnsupportedOrder(self.order));
        }
        if !(self.truncation_bound > 0.0) {
            return Err(ZwmError::Config(format!(
                "truncation bound must be positive, got {}",
                self.truncation_bound
            )));
        }
        if !self.phi_i.is_finite() || !self.phi_s.is_finite() || !self.pump.phase().is_finite() {
            return Err(ZwmError::Config("phases must be finite".into()));
        }
        if let Pump::Coherent { alpha1, alpha2 } = self.pump {
            let (n1, n2) = (alpha1.norm(), alpha2.norm());
            if !n1.is_finite() || !n2.is_finite() {
                return Err(ZwmError::Config("coherent amplitudes must be finite".into()));
            }
            if !self.allow_unequal_pumps && (n1 - n2).abs() > EQUAL_PUMP_TOL * n1.max(n2) {
                return Err(ZwmError::Config(format!(
                    "pump intensities differ (|alpha1| = {n1}, |alpha2| = {n2}); set allow_unequal_pumps to override"
                )));
            }
        }
        if let Some(c) = self.cutoffs {
            if t < 1.0 && c.loss.is_none() {
                return Err(ZwmError::Config(
                    "a partially transmitting idler filter needs a loss-mode cutoff".into(),
                ));
            }
        }
        Ok(())
    }

    /// Cutoffs in effect: the explicit ones, or defaults that hold every
    /// photon the propagators can create.
    pub fn resolved_cutoffs(&self) -> Cutoffs {
        if let Some(c) = self.cutoffs {
            return c;
        }
        let order = self.order;
        let loss = (self.idler_transmission < 1.0).then_some(order);
        match self.pump {
            Pump::SinglePhoton { .. } => Cutoffs {
                pump1: 1,
                pump2: 1,
                signal1: 1,
                signal2: 1,
                idler: 1,
                loss: loss.map(|_| 1),
            },
            Pump::Coherent { alpha1, alpha2 } => {
                let tail = self.truncation_bound / 100.0;
                Cutoffs {
                    pump1: coherent_cutoff(alpha1, tail) + order,
                    pump2: coherent_cutoff(alpha2, tail) + order,
                    signal1: order,
                    signal2: order,
                    idler: 2 * order,
                    loss,
                }
            }
        }
    }

    pub fn registry(&self) -> Result<Arc<ModeRegistry>> {
        Ok(Arc::new(self.resolved_cutoffs().registry()?))
    }

    pub fn crystal_params(&self, crystal: CrystalId) -> CrystalParams {
        let phase = match crystal {
            CrystalId::One => 0.0,
            CrystalId::Two => self.phi_i,
        };
        self.crystal.for_crystal(crystal, phase)
    }
}

/// Initial pump state with signal, idler and loss modes in vacuum.
pub fn prepare_pump(config: &ZwmConfig, registry: Arc<ModeRegistry>) -> Result<StateVector> {
    match config.pump {
        Pump::SinglePhoton { phi_p } => {
            let one = StateVector::fock(registry.clone(), &[(Mode::Pump1, 1)])?;
            let two = StateVector::fock(registry, &[(Mode::Pump2, 1)])?;
            one.combine(
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                &two,
                Complex64::from_polar(FRAC_1_SQRT_2, phi_p),
            )
        }
        Pump::Coherent { alpha1, alpha2 } => {
            let (c1, c2) = (registry.cutoff(Mode::Pump1)?, registry.cutoff(Mode::Pump2)?);
            let (a1, tail1) = coherent_amplitudes(alpha1, c1);
            let (a2, tail2) = coherent_amplitudes(alpha2, c2);
            let tail = tail1 + tail2;
            if tail > config.truncation_bound {
                return Err(ZwmError::Sizing(format!(
                    "pump cutoffs ({c1}, {c2}) drop {tail:.3e} of the coherent state, above the bound {:.3e}",
                    config.truncation_bound
                )));
            }
            Ok(StateVector::product(registry, &[(Mode::Pump1, &a1), (Mode::Pump2, &a2)])?.with_truncation_loss(tail))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZwmOutput {
    /// Normalized output state.
    pub state: StateVector,
    pub config: ZwmConfig,
    /// Normalized input state.
    pub initial: StateVector,
    /// Squared norm before renormalization.
    pub norm_sqr_before: f64,
    pub truncation_loss: f64,
    /// `|g'| tau` is within the validated perturbative regime.
    pub perturbative: bool,
}

impl ZwmOutput {
    /// Overlap `<psi_0 | Psi>` with the input state.
    pub fn eta(&self) -> Result<Complex64> {
        self.initial.inner(&self.state)
    }

    /// Amplitude of `|vac_P, 1_S1, 1_I>`.
    pub fn g_sp(&self) -> Result<Complex64> {
        self.state.amplitude(&[(Mode::Signal1, 1), (Mode::Idler, 1)])
    }

    /// Overlap of the output with the input pump state times the given
    /// signal, idler and loss occupations. For a coherent pump this is the
    /// amplitude of a term of the output with the pump treated as a
    /// classical field.
    pub fn pump_projected_amplitude(&self, occupied: &[(Mode, u32)]) -> Result<Complex64> {
        let registry = self.state.registry();
        let mut shift = 0;
        for &(mode, n) in occupied {
            if matches!(mode, Mode::Pump1 | Mode::Pump2) {
                return Err(ZwmError::Config(format!("{mode} is fixed by the pump projection")));
            }
            let pos = registry.position(mode)?;
            if n > registry.cutoffs()[pos] {
                return Err(ZwmError::OccupationOutOfRange {
                    mode,
                    occupation: n,
                    cutoff: registry.cutoffs()[pos],
                });
            }
            shift += n as usize * registry.stride(pos);
        }
        let (pumped, _) = self.initial.normalized()?;
        let out = self.state.amplitudes();
        Ok(pumped
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(index, a)| a.conj() * out[index + shift])
            .sum())
    }

    /// First-order coefficient `g` of the crystal propagator.
    pub fn g_lp(&self) -> Result<Complex64> {
        Ok(analytic_coefficients(&self.config.crystal)?.g)
    }

    pub fn mean_photon_number(&self, mode: Mode) -> Result<f64> {
        let registry = self.state.registry();
        let pos = registry.position(mode)?;
        Ok(self
            .state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(index, a)| registry.occupation_at(index, pos) as f64 * a.norm_sqr())
            .sum())
    }
}

/// Runs the cascade from the pump state of `config`.
pub fn run_zwm(config: &ZwmConfig) -> Result<ZwmOutput> {
    config.validate()?;
    let registry = config.registry()?;
    let initial = prepare_pump(config, registry)?;
    run_zwm_from(config, initial)
}

/// Runs the cascade from an arbitrary normalized initial state.
pub fn run_zwm_from(config: &ZwmConfig, initial: StateVector) -> Result<ZwmOutput> {
    config.validate()?;
    let first = config.crystal_params(CrystalId::One);
    let second = config.crystal_params(CrystalId::Two);
    let perturbative = first.is_perturbative();
    if !perturbative {
        log::warn!(
            "gain |g'| tau = {:.3} is outside the validated perturbative regime",
            first.gain()
        );
    }

    let u1 = dyson_propagator(&first, config.order)?;
    let u2 = dyson_propagator(&second, config.order)?;

    let after_first = u1.apply(&initial)?;
    let filtered = apply_idler_filter(&after_first, config.idler_transmission)?;
    let evolved = u2.apply(&filtered)?;
    let (state, norm_sqr_before) = evolved.normalized()?;

    let truncation_loss = state.truncation_loss();
    if truncation_loss > config.truncation_bound {
        return Err(ZwmError::TruncationLoss {
            loss: truncation_loss,
            bound: config.truncation_bound,
        });
    }
    log::debug!("cascade norm before renormalization {norm_sqr_before:.6e}, truncation loss {truncation_loss:.3e}");

    Ok(ZwmOutput {
        state,
        config: *config,
        initial,
        norm_sqr_before,
        truncation_loss,
        perturbative,
    })
}
