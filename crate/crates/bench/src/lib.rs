//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use ndarray::Array2;

use zwm_core::dynamics::build_hamiltonian;
use zwm_core::fock::coherent_amplitudes;
use zwm_core::{Complex64, CrystalId, CrystalParams, Mode, ModeRegistry, StateVector, ZwmConfig};

pub fn crystal(g: f64) -> CrystalParams {
    CrystalParams::new(Complex64::new(g, 0.0), 1.0, 0.0, CrystalId::One).expect("valid crystal")
}

/// Pump, signal and idler of one crystal, all truncated at `cutoff`.
pub fn crystal_registry(cutoff: u32) -> Arc<ModeRegistry> {
    Arc::new(
        ModeRegistry::new([(Mode::Pump1, cutoff), (Mode::Signal1, cutoff), (Mode::Idler, cutoff)])
            .expect("small registry"),
    )
}

/// `-i H tau` of one crystal as a dense matrix.
pub fn dense_generator(cutoff: u32) -> Array2<Complex64> {
    let registry = crystal_registry(cutoff);
    let h = build_hamiltonian(&crystal(0.1), &registry, 0.0)
        .expect("modes present")
        .to_dense(&registry)
        .expect("dense fits");
    h * Complex64::new(0.0, -1.0)
}

/// Full interferometer input for a coherent pump of amplitude `alpha`.
pub fn coherent_input(alpha: f64) -> (ZwmConfig, StateVector) {
    let config = ZwmConfig::coherent(0.1, Complex64::new(alpha, 0.0)).expect("valid config");
    let registry = config.registry().expect("registry");
    let state = zwm_core::interferometer::prepare_pump(&config, registry).expect("pump fits");
    (config, state)
}

/// Coherent pump photons in the first mode of a single-crystal registry.
pub fn pumped_crystal(cutoff: u32, alpha: f64) -> StateVector {
    let (amps, _) = coherent_amplitudes(Complex64::new(alpha, 0.0), cutoff);
    StateVector::product(crystal_registry(cutoff), &[(Mode::Pump1, &amps)]).expect("fits")
}
