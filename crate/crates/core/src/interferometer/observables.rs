use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::{ZwmConfig, ZwmOutput};
use crate::error::{Result, ZwmError};
use crate::fock::{Mode, ModeRegistry};
use crate::operator::{LadderFactor, OperatorSum};

/// Positive-frequency field at the detector, `a_S1 + i e^{i phi_s} a_S2`.
pub fn detector_field(registry: &ModeRegistry, phi_s: f64) -> Result<OperatorSum> {
    for mode in [Mode::Signal1, Mode::Signal2] {
        if !registry.contains(mode) {
            return Err(ZwmError::UnknownMode(mode));
        }
    }
    Ok(OperatorSum::annihilate(Mode::Signal1)
        + OperatorSum::annihilate(Mode::Signal2).scale(Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, phi_s)))
}

/// Counting rate `<E- E+>` at signal phase `phi_s`, unit detector efficiency.
pub fn detection_rate(output: &ZwmOutput, phi_s: f64) -> Result<f64> {
    let field = detector_field(output.state.registry(), phi_s)?;
    Ok(field.apply(&output.state)?.norm_sqr())
}

/// Signal-signal coincidence rate `<a+_S1 a+_S2 a_S2 a_S1>`.
pub fn coincidence_rate(output: &ZwmOutput) -> Result<f64> {
    let pair = OperatorSum::product(
        Complex64::new(1.0, 0.0),
        vec![
            LadderFactor::annihilate(Mode::Signal2),
            LadderFactor::annihilate(Mode::Signal1),
        ],
    );
    Ok(pair.apply(&output.state)?.norm_sqr())
}

/// Interferometric phase `phi_S + phi_P - phi_I + pi/2`.
pub fn phi_in(config: &ZwmConfig) -> f64 {
    config.phi_s + config.pump.phase() - config.phi_i + FRAC_PI_2
}
