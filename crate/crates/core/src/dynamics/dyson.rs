use ndarray::Array2;
use num_complex::Complex64;

use super::expm::expm;
use super::hamiltonian::pair_operator;
use super::CrystalParams;
use crate::error::{Result, ZwmError};
use crate::operator::OperatorSum;

pub const MAX_DYSON_ORDER: u32 = 3;

/// Nested time-ordered integral
/// `int_0^tau dt1 e^{i w1 t1} int_0^t1 dt2 e^{i w2 t2} ... int_0^t(k-1) dtk e^{i wk tk}`.
///
/// Evaluated in closed form as the corner entry of `exp(tau M)` where `M`
/// is upper bidiagonal with diagonal `i (w1 + ... + wj)`, `j = 0..=k`, and
/// unit superdiagonal. This is the divided difference of the exponential,
/// so coincident frequencies (including zero detuning) need no special case.
pub fn time_ordered_integral(frequencies: &[f64], tau: f64) -> Complex64 {
    let k = frequencies.len();
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut m = Array2::zeros((k + 1, k + 1));
    let mut cumulative = 0.0;
    for j in 0..=k {
        if j > 0 {
            cumulative += frequencies[j - 1];
        }
        m[[j, j]] = Complex64::new(0.0, cumulative * tau);
        if j < k {
            m[[j, j + 1]] = Complex64::new(tau, 0.0);
        }
    }
    expm(&m)[[0, k]]
}

/// Time-ordered perturbative propagator of one crystal, truncated at `order`:
///
/// `1 + sum_{k=1}^{order} (-i)^k int_{t1 > ... > tk} H(t1) ... H(tk)`
///
/// with `H(t) = g' e^{i dw t} K + conj(g') e^{-i dw t} K+` and `K` the pair
/// operator. Every operator product is kept, so at order 2 the result holds
/// the `g^2/2 K^2` double-pair term and the `K+ K` term whose coefficient is
/// `g~^2`, alongside the `K K+` and `(K+)^2` terms.
pub fn dyson_propagator(params: &CrystalParams, order: u32) -> Result<OperatorSum> {
    if order == 0 || order > MAX_DYSON_ORDER {
        return Err(ZwmError::UnsupportedOrder(order));
    }
    params.validate()?;

    let raise = pair_operator(params).scale(params.g_prime);
    let lower = raise.adjoint();
    let dw = params.delta_omega;

    let mut propagator = OperatorSum::identity();
    let mut prefactor = Complex64::new(1.0, 0.0);
    for k in 1..=order {
        prefactor *= Complex64::new(0.0, -1.0);
        for signs in 0..(1u32 << k) {
            // bit m of `signs` selects the operator at the m-th latest time
            let mut frequencies = Vec::with_capacity(k as usize);
            let mut product = OperatorSum::identity();
            for m in 0..k {
                let creates = signs & (1 << m) == 0;
                let (op, w) = if creates { (&raise, dw) } else { (&lower, -dw) };
                frequencies.push(w);
                product = &product * op;
            }
            let weight = prefactor * time_ordered_integral(&frequencies, params.tau);
            propagator = propagator + product.scale(weight);
        }
    }
    Ok(propagator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{analytic_coefficients, CrystalId};
    use crate::quadrature::{integrate, integrate_time_ordered};
    use approx::assert_abs_diff_eq;

    fn e(w: f64) -> impl Fn(f64) -> Complex64 {
        move |t| Complex64::from_polar(1.0, w * t)
    }

    #[test]
    fn single_integral_matches_quadrature() {
        for &(w, tau) in &[(0.0, 1.0), (1e-7, 2.0), (3.1, 0.7), (-12.0, 1.3)] {
            let closed = time_ordered_integral(&[w], tau);
            let quad = integrate(e(w), 0.0, tau, 1e-14).unwrap();
            assert_abs_diff_eq!((closed - quad).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn double_integral_matches_quadrature() {
        for &(w1, w2, tau) in &[
            (0.0, 0.0, 1.0),
            (1.5, -1.5, 1.0),
            (-0.4, 0.4, 2.5),
            (2.0, 2.0, 0.8),
            (1e-6, -1e-6, 1.0),
        ] {
            let closed = time_ordered_integral(&[w1, w2], tau);
            let quad = integrate_time_ordered(e(w1), e(w2), tau, 1e-13).unwrap();
            assert_abs_diff_eq!((closed - quad).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn triple_integral_at_zero_detuning() {
        assert_abs_diff_eq!(
            (time_ordered_integral(&[0.0; 3], 2.0) - 8.0 / 6.0).norm(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn unsupported_orders() {
        let p = CrystalParams::new(Complex64::new(0.1, 0.0), 1.0, 0.0, CrystalId::One).unwrap();
        assert_eq!(dyson_propagator(&p, 0).unwrap_err(), ZwmError::UnsupportedOrder(0));
        assert_eq!(dyson_propagator(&p, 4).unwrap_err(), ZwmError::UnsupportedOrder(4));
    }

    #[test]
    fn first_order_weight_is_g() {
        for &dw in &[0.0, 0.9, -4.0] {
            let p = CrystalParams::new(Complex64::new(0.03, 0.01), 1.4, dw, CrystalId::One).unwrap();
            let u = dyson_propagator(&p, 1).unwrap();
            let g = analytic_coefficients(&p).unwrap().g;
            // terms: identity, K, K+
            assert_eq!(u.terms().len(), 3);
            assert_abs_diff_eq!((u.terms()[1].coeff - g).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn term_count() {
        let p = CrystalParams::new(Complex64::new(0.03, 0.0), 1.0, 0.0, CrystalId::Two).unwrap();
        assert_eq!(dyson_propagator(&p, 2).unwrap().terms().len(), 1 + 2 + 4);
        assert_eq!(dyson_propagator(&p, 3).unwrap().terms().len(), 1 + 2 + 4 + 8);
    }
}
