use ndarray::Array2;
use num_complex::Complex64;

use super::expm::expm;
use super::hamiltonian::build_hamiltonian;
use super::CrystalParams;
use crate::error::{Result, ZwmError};
use crate::fock::ModeRegistry;

/// Largest basis for which a dense propagator is built by default.
pub const DEFAULT_DENSE_LIMIT: usize = 20_000;

/// `exp(-i H tau)` as a dense matrix on the truncated basis.
///
/// Only defined at zero detuning, where `H` is time independent.
pub fn exact_propagator(params: &CrystalParams, registry: &ModeRegistry) -> Result<Array2<Complex64>> {
    exact_propagator_with_limit(params, registry, DEFAULT_DENSE_LIMIT)
}

pub fn exact_propagator_with_limit(
    params: &CrystalParams,
    registry: &ModeRegistry,
    max_dim: usize,
) -> Result<Array2<Complex64>> {
    if params.delta_omega != 0.0 {
        return Err(ZwmError::Config(format!(
            "exact propagator needs zero detuning, got {}",
            params.delta_omega
        )));
    }
    if registry.len() > max_dim {
        return Err(ZwmError::Sizing(format!(
            "dense propagator of dimension {} exceeds the limit {max_dim}",
            registry.len()
        )));
    }
    let h = build_hamiltonian(params, registry, 0.0)?.to_dense(registry)?;
    Ok(expm(&(h * Complex64::new(0.0, -params.tau))))
}

/// Frobenius norm of `U+ U - 1`.
pub fn unitarity_defect(u: &Array2<Complex64>) -> f64 {
    let mut product = u.t().mapv(|z| z.conj()).dot(u);
    for i in 0..product.nrows() {
        product[[i, i]] -= 1.0;
    }
    product.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
