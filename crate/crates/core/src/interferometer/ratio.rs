use num_complex::Complex64;

use super::{run_zwm, Pump, ZwmConfig};
use crate::error::{Result, ZwmError};
use crate::fock::Mode;

/// Relative tolerance on the single-photon matching condition.
pub const RATIO_MATCH_TOL: f64 = 1e-6;

const MATCH_MAX_ITER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    /// `<n_S2>_lp / <n_S2>_sp`.
    pub rho: f64,
    pub n_s2_lp: f64,
    pub n_s2_sp: f64,
    /// Signal intensity from the first crystal under the coherent pump.
    pub n_s1_lp: f64,
    /// Pair amplitude of the single-photon run.
    pub g_sp: Complex64,
    /// `|g alpha|^2` with `g` the first-order coefficient.
    pub x: f64,
    /// Relative mismatch `| |G_sp| - sqrt(<n_S1>_lp) | / sqrt(<n_S1>_lp)`.
    pub match_error: f64,
}

/// Ratio of second-crystal signal intensities for a coherent and a
/// single-photon pump at equal single-crystal emission.
///
/// The runs are matched when the single-photon pair amplitude `|G_sp|`
/// equals the signal amplitude `sqrt(<n_S1>)` emitted by the first crystal
/// under the coherent pump, i.e. both pumps give the same first-crystal
/// count rate. [`match_single_photon`] builds such a `config_sp`.
pub fn nl2_nl1_ratio(config_lp: &ZwmConfig, config_sp: &ZwmConfig) -> Result<RatioReport> {
    let alpha = match config_lp.pump {
        Pump::Coherent { alpha1, .. } => alpha1,
        Pump::SinglePhoton { .. } => {
            return Err(ZwmError::Config(
                "the first configuration must use a coherent pump".into(),
            ))
        }
    };
    if !config_sp.pump.is_single_photon() {
        return Err(ZwmError::Config(
            "the second configuration must use a single-photon pump".into(),
        ));
    }
    let lp = run_zwm(config_lp)?;
    let sp = run_zwm(config_sp)?;

    let n_s1_lp = lp.mean_photon_number(Mode::Signal1)?;
    let n_s2_lp = lp.mean_photon_number(Mode::Signal2)?;
    let n_s2_sp = sp.mean_photon_number(Mode::Signal2)?;
    let g_sp = sp.g_sp()?;
    let target = n_s1_lp.sqrt();
    let match_error = (g_sp.norm() - target).abs() / target;
    if !(match_error <= RATIO_MATCH_TOL) {
        return Err(ZwmError::Config(format!(
            "|G_sp| = {:.6e} does not match the first-crystal signal amplitude {target:.6e} (relative {match_error:.2e})",
            g_sp.norm()
        )));
    }
    let g = lp.g_lp()?;
    Ok(RatioReport {
        rho: n_s2_lp / n_s2_sp,
        n_s2_lp,
        n_s2_sp,
        n_s1_lp,
        g_sp,
        x: (g * alpha).norm_sqr(),
        match_error,
    })
}

/// Single-photon counterpart of `config_lp` whose gain is tuned so that
/// `|G_sp| = sqrt(<n_S1>_lp)`. Phases, filter, order and detuning are kept.
pub fn match_single_photon(config_lp: &ZwmConfig) -> Result<ZwmConfig> {
    let target = run_zwm(config_lp)?.mean_photon_number(Mode::Signal1)?.sqrt();
    let phi_p = config_lp.pump.phase();
    let base = ZwmConfig {
        pump: Pump::SinglePhoton { phi_p },
        cutoffs: None,
        allow_unequal_pumps: false,
        ..*config_lp
    };
    let g0 = config_lp.crystal.g_prime;
    if target == 0.0 || g0.norm() == 0.0 {
        return Err(ZwmError::Config(
            "matching needs a non-zero coherent-pump signal".into(),
        ));
    }
    let amplitude = |scale: f64| -> Result<f64> { Ok(run_zwm(&base.with_g_prime(g0 * scale))?.g_sp()?.norm()) };

    // |G_sp| grows like the gain, so rescaling by target / |G_sp| converges quickly
    let mut scale = target / amplitude(1.0)?;
    for _ in 0..MATCH_MAX_ITER {
        let current = amplitude(scale)?;
        let next = scale * target / current;
        if ((next - scale) / scale).abs() < 1e-14 {
            return Ok(base.with_g_prime(g0 * next));
        }
        scale = next;
    }
    Err(ZwmError::Config(format!(
        "single-photon gain matching did not converge (target amplitude {target:.6e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ratio_tends_to_one() {
        let lp = ZwmConfig::coherent(0.1, Complex64::new(0.01, 0.0)).unwrap();
        let sp = match_single_photon(&lp).unwrap();
        let report = nl2_nl1_ratio(&lp, &sp).unwrap();
        assert_abs_diff_eq!(report.rho, 1.0, epsilon = 1e-5);
        assert!(report.match_error < 1e-12);
    }

    #[test]
    fn mismatched_gain_is_rejected() {
        let lp = ZwmConfig::coherent(0.1, Complex64::new(0.5, 0.0)).unwrap();
        let sp = ZwmConfig::single_photon(0.1, 0.0).unwrap();
        assert!(matches!(nl2_nl1_ratio(&lp, &sp), Err(ZwmError::Config(_))));
        assert!(matches!(nl2_nl1_ratio(&sp, &lp), Err(ZwmError::Config(_))));
    }
}
