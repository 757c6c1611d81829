use num_complex::Complex64;

use super::CrystalParams;
use crate::error::{Result, ZwmError};
use crate::fock::{Mode, ModeRegistry};
use crate::operator::{LadderFactor, OperatorSum};

/// Pair-creation operator `e^{-i phi_I} a_P a+_S a+_I` of one crystal.
///
/// The phase comes from the idler alignment `a_I2 = a_I1 e^{i phi_I}`: the
/// second crystal creates into the shared idler mode with `a+_I e^{-i phi_I}`.
pub fn pair_operator(params: &CrystalParams) -> OperatorSum {
    let crystal = params.crystal;
    OperatorSum::product(
        Complex64::from_polar(1.0, -params.idler_phase),
        vec![
            LadderFactor::annihilate(crystal.pump()),
            LadderFactor::create(crystal.signal()),
            LadderFactor::create(Mode::Idler),
        ],
    )
}

pub(crate) fn check_crystal_modes(params: &CrystalParams, registry: &ModeRegistry) -> Result<()> {
    for mode in [params.crystal.pump(), params.crystal.signal(), Mode::Idler] {
        if !registry.contains(mode) {
            return Err(ZwmError::UnknownMode(mode));
        }
    }
    Ok(())
}

/// Interaction-picture Hamiltonian at time `t`:
/// `g' e^{i dw t} a_P a+_S a+_I + h.c.`
pub fn build_hamiltonian(params: &CrystalParams, registry: &ModeRegistry, t: f64) -> Result<OperatorSum> {
    params.validate()?;
    check_crystal_modes(params, registry)?;
    let forward = pair_operator(params).scale(params.g_prime * Complex64::from_polar(1.0, params.delta_omega * t));
    let backward = forward.adjoint();
    Ok(forward + backward)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::CrystalId;
    use crate::fock::StateVector;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn registry() -> Arc<ModeRegistry> {
        Arc::new(
            ModeRegistry::new([
                (Mode::Pump1, 2),
                (Mode::Pump2, 1),
                (Mode::Signal1, 2),
                (Mode::Signal2, 1),
                (Mode::Idler, 3),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn single_term_fires_on_pump_photon() {
        let reg = registry();
        let g = c(0.07, -0.02);
        let params = CrystalParams::new(g, 1.0, 0.0, CrystalId::One).unwrap();
        let h = build_hamiltonian(&params, &reg, 0.0).unwrap();
        let out = h
            .apply(&StateVector::fock(reg.clone(), &[(Mode::Pump1, 1)]).unwrap())
            .unwrap();
        let expected = StateVector::fock(reg, &[(Mode::Signal1, 1), (Mode::Idler, 1)])
            .unwrap()
            .scaled(g);
        assert_abs_diff_eq!(out.distance(&expected).unwrap(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn hermitian_matrix() {
        let reg = registry();
        for crystal in [CrystalId::One, CrystalId::Two] {
            let params = CrystalParams::new(c(0.4, 0.3), 2.0, 1.7, crystal)
                .unwrap()
                .for_crystal(crystal, 0.9);
            let m = build_hamiltonian(&params, &reg, 0.37).unwrap().to_dense(&reg).unwrap();
            let mh = m.t().mapv(|z| z.conj());
            assert_eq!(m, mh);
        }
    }

    #[test]
    fn detuned_matrix_element() {
        let reg = registry();
        let (g, dw, t) = (c(0.2, 0.1), 3.0, 0.45);
        let params = CrystalParams::new(g, 1.0, dw, CrystalId::One).unwrap();
        let m = build_hamiltonian(&params, &reg, t).unwrap().to_dense(&reg).unwrap();
        let row = reg.index_of_modes(&[(Mode::Signal1, 1), (Mode::Idler, 1)]).unwrap();
        let col = reg.index_of_modes(&[(Mode::Pump1, 1)]).unwrap();
        let expected = g * Complex64::from_polar(1.0, dw * t);
        assert_abs_diff_eq!((m[[row, col]] - expected).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn second_crystal_carries_idler_phase() {
        let reg = registry();
        let phi = 0.8;
        let params = CrystalParams::new(c(1.0, 0.0), 1.0, 0.0, CrystalId::Two)
            .unwrap()
            .for_crystal(CrystalId::Two, phi);
        let m = build_hamiltonian(&params, &reg, 0.0).unwrap().to_dense(&reg).unwrap();
        let row = reg.index_of_modes(&[(Mode::Signal2, 1), (Mode::Idler, 1)]).unwrap();
        let col = reg.index_of_modes(&[(Mode::Pump2, 1)]).unwrap();
        assert_abs_diff_eq!(
            (m[[row, col]] - Complex64::from_polar(1.0, -phi)).norm(),
            0.0,
            epsilon = 1e-16
        );
    }

    #[test]
    fn missing_modes() {
        let reg = ModeRegistry::new([(Mode::Pump1, 1), (Mode::Signal1, 1)]).unwrap();
        let params = CrystalParams::new(c(1.0, 0.0), 1.0, 0.0, CrystalId::One).unwrap();
        assert_eq!(
            build_hamiltonian(&params, &reg, 0.0).unwrap_err(),
            ZwmError::UnknownMode(Mode::Idler)
        );
    }
}
