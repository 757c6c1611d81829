use num_complex::Complex64;

use crate::error::{Result, ZwmError};
use crate::fock::{Mode, StateVector};

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Idler filter as a beam splitter between the idler and the loss mode:
///
/// `|n_I, 0_L> -> sum_k sqrt(C(n, k)) t^k r^(n-k) |k_I, (n-k)_L>`, `r = sqrt(1 - t^2)`.
///
/// The loss mode must be empty on input. With `t = 1` the state is returned
/// unchanged and no loss mode is needed.
pub fn apply_idler_filter(state: &StateVector, t: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(ZwmError::Config(format!(
            "idler transmission must lie in [0, 1], got {t}"
        )));
    }
    let registry = state.registry();
    if t == 1.0 {
        return Ok(state.clone());
    }
    if !registry.contains(Mode::Loss) {
        return Err(ZwmError::Config(
            "a partially transmitting idler filter needs a loss mode in the registry".into(),
        ));
    }
    let idler = registry.position(Mode::Idler)?;
    let loss = registry.position(Mode::Loss)?;
    let loss_cutoff = registry.cutoffs()[loss];
    let (idler_stride, loss_stride) = (registry.stride(idler), registry.stride(loss));
    let r = (1.0 - t * t).sqrt();

    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; registry.len()];
    let mut dropped = 0.0;
    for (index, &amp) in state.amplitudes().iter().enumerate() {
        if amp == zero {
            continue;
        }
        if registry.occupation_at(index, loss) != 0 {
            return Err(ZwmError::Config(
                "the loss mode must be empty before the idler filter".into(),
            ));
        }
        let n = registry.occupation_at(index, idler);
        let base = index - n as usize * idler_stride;
        for k in 0..=n {
            let reflected = n - k;
            let weight = binomial(n, k).sqrt() * t.powi(k as i32) * r.powi(reflected as i32);
            if weight == 0.0 {
                continue;
            }
            if reflected > loss_cutoff {
                dropped += (weight * amp.norm()).powi(2);
                continue;
            }
            out[base + k as usize * idler_stride + reflected as usize * loss_stride] += amp * weight;
        }
    }
    Ok(StateVector::from_parts(
        registry.clone(),
        out,
        state.truncation_loss() + dropped,
    ))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fock::ModeRegistry;
    use approx::assert_abs_diff_eq;

    fn registry(loss: u32) -> Arc<ModeRegistry> {
        Arc::new(ModeRegistry::new([(Mode::Signal1, 1), (Mode::Idler, 2), (Mode::Loss, loss)]).unwrap())
    }

    #[test]
    fn single_photon_split() {
        let reg = registry(2);
        let t = 0.6;
        let psi = StateVector::fock(reg.clone(), &[(Mode::Signal1, 1), (Mode::Idler, 1)]).unwrap();
        let out = apply_idler_filter(&psi, t).unwrap();
        assert_abs_diff_eq!(
            out.amplitude(&[(Mode::Signal1, 1), (Mode::Idler, 1)]).unwrap().re,
            t,
            epsilon = 1e-16
        );
        assert_abs_diff_eq!(
            out.amplitude(&[(Mode::Signal1, 1), (Mode::Loss, 1)]).unwrap().re,
            0.8,
            epsilon = 1e-16
        );
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_photons_preserve_norm() {
        let reg = registry(2);
        let psi = StateVector::fock(reg, &[(Mode::Idler, 2)]).unwrap();
        for t in [0.0, 0.3, 0.9] {
            let out = apply_idler_filter(&psi, t).unwrap();
            assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-15);
            assert_eq!(out.truncation_loss(), 0.0);
        }
    }

    #[test]
    fn blocked_and_transparent() {
        let reg = registry(2);
        let psi = StateVector::fock(reg.clone(), &[(Mode::Idler, 2)]).unwrap();
        let blocked = apply_idler_filter(&psi, 0.0).unwrap();
        assert_abs_diff_eq!(blocked.amplitude(&[(Mode::Loss, 2)]).unwrap().re, 1.0, epsilon = 1e-16);
        assert_eq!(apply_idler_filter(&psi, 1.0).unwrap().amplitudes(), psi.amplitudes());
    }

    #[test]
    fn small_loss_cutoff_is_accounted() {
        let reg = registry(1);
        let psi = StateVector::fock(reg, &[(Mode::Idler, 2)]).unwrap();
        let out = apply_idler_filter(&psi, 0.0).unwrap();
        assert_abs_diff_eq!(out.truncation_loss(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn occupied_loss_mode_is_rejected() {
        let reg = registry(1);
        let psi = StateVector::fock(reg, &[(Mode::Loss, 1)]).unwrap();
        assert!(matches!(apply_idler_filter(&psi, 0.5), Err(ZwmError::Config(_))));
    }
}
