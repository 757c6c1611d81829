use std::f64::consts::TAU;

use approx::assert_abs_diff_eq;
use zwm_core::dynamics::sinc;
use zwm_core::interferometer::{
    coincidence_rate, fit_fringe, fringe_scan, match_single_photon, nl2_nl1_ratio, run_zwm,
};
use zwm_core::{Complex64, Cutoffs, Mode, ZwmConfig, ZwmError};

fn phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

#[test]
fn single_photon_visibility_equals_transmission() {
    for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
        let config = ZwmConfig::single_photon(0.1, 0.3)
            .unwrap()
            .with_phases(0.7, 0.0)
            .with_transmission(t);
        let out = run_zwm(&config).unwrap();
        let fit = fit_fringe(&fringe_scan(&out, &phases(16)).unwrap()).unwrap();
        assert_abs_diff_eq!(fit.visibility, t, epsilon = 1e-9);
        assert!(fit.relative_residual() < 1e-9);
        if t > 0.0 {
            // maximum at phi_in = 0
            assert_abs_diff_eq!(fit.phase, 0.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn detuning_scales_emission_by_sinc_squared() {
    let base = ZwmConfig::single_photon(0.05, 0.0).unwrap();
    let n0 = run_zwm(&base).unwrap().mean_photon_number(Mode::Signal1).unwrap();
    for dw in [0.5, 2.0, 5.0] {
        let detuned = ZwmConfig::new(base.pump, Complex64::new(0.05, 0.0), 1.0, dw).unwrap();
        let n = run_zwm(&detuned).unwrap().mean_photon_number(Mode::Signal1).unwrap();
        let expected = sinc(dw / 2.0).powi(2);
        assert!(
            (n / n0 - expected).abs() < 1e-3 * expected.max(1e-3),
            "dw {dw}: {} vs {expected}",
            n / n0
        );
    }
}

#[test]
fn coherent_visibility_drops_with_pump_power() {
    let mut last = 1.0;
    for alpha in [0.2, 0.5, 1.0] {
        let out = run_zwm(&ZwmConfig::coherent(0.1, Complex64::new(alpha, 0.0)).unwrap()).unwrap();
        let fit = fit_fringe(&fringe_scan(&out, &phases(16)).unwrap()).unwrap();
        assert!(
            fit.visibility < last && fit.visibility > 0.95,
            "alpha {alpha}: V {}",
            fit.visibility
        );
        last = fit.visibility;
    }
}

#[test]
fn ratio_follows_pump_power() {
    let lp = ZwmConfig::coherent(0.15, Complex64::new(0.8, 0.0)).unwrap();
    let report = nl2_nl1_ratio(&lp, &match_single_photon(&lp).unwrap()).unwrap();
    assert!(report.match_error < 1e-6);
    assert_abs_diff_eq!(report.x, 0.0144, epsilon = 1e-12);
    assert_abs_diff_eq!(report.rho, 1.0 + report.x, epsilon = 1e-3);
}

#[test]
fn coincidence_needs_two_pump_photons() {
    let sp = run_zwm(&ZwmConfig::single_photon(0.2, 0.0).unwrap()).unwrap();
    assert_eq!(coincidence_rate(&sp).unwrap(), 0.0);
    let lp = run_zwm(&ZwmConfig::coherent(0.2, Complex64::new(0.1, 0.0)).unwrap()).unwrap();
    assert!(coincidence_rate(&lp).unwrap() > 0.0);
}

#[test]
fn undersized_cutoffs_are_refused() {
    let config = ZwmConfig::coherent(0.1, Complex64::new(1.0, 0.0)).unwrap();
    let cutoffs = Cutoffs {
        signal1: 1,
        signal2: 1,
        idler: 1,
        ..config.resolved_cutoffs()
    };
    let err = run_zwm(&config.with_cutoffs(cutoffs)).unwrap_err();
    assert!(matches!(err, ZwmError::TruncationLoss { .. }), "{err:?}");
}

#[test]
fn third_order_correction_to_single_photon_fringe_is_small() {
    let gains = [0.01, 0.02, 0.04];
    let changes: Vec<f64> = gains
        .iter()
        .map(|&g| {
            let base = ZwmConfig::single_photon(g, 0.0).unwrap();
            let r2 = fringe_scan(&run_zwm(&base).unwrap(), &phases(16)).unwrap();
            let r3 = fringe_scan(&run_zwm(&base.with_order(3)).unwrap(), &phases(16)).unwrap();
            r2.iter().zip(&r3).map(|(a, b)| (a.rate - b.rate).abs()).fold(0.0, f64::max)
        })
        .collect();
    let slope = (changes[2] / changes[0]).ln() / (gains[2] / gains[0]).ln();
    assert!(slope >= 3.0 - 0.1, "order 2 -> 3 change scales as g^{slope}");
    assert!(changes[2] <= gains[2].powi(3));
}
