//! Adaptive Gauss–Kronrod (7/15) quadrature for smooth complex integrands.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use crate::error::{Result, ZwmError};

const MAX_DEPTH: u32 = 48;

/// Error estimates below this multiple of `eps |integral|` are rounding noise.
const ROUNDOFF_FACTOR: f64 = 50.0;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

fn adapt<F>(f: &F, a: f64, b: f64, whole: Complex64, err: f64, tol: f64, depth: u32) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if err <= tol || err <= ROUNDOFF_FACTOR * f64::EPSILON * whole.norm() {
        return Ok(whole);
    }
    if depth >= MAX_DEPTH {
        return Err(ZwmError::Quadrature(format!(
            "error estimate {err:.3e} above {tol:.3e} on [{a}, {b}] at maximum depth"
        )));
    }
    let mid = 0.5 * (a + b);
    let (left, el) = gk15(f, a, mid);
    let (right, er) = gk15(f, mid, b);
    Ok(adapt(f, a, mid, left, el, 0.5 * tol, depth + 1)? + adapt(f, mid, b, right, er, 0.5 * tol, depth + 1)?)
}

/// `int_a^b f(t) dt` to absolute tolerance `abs_tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (whole, err) = gk15(&f, a, b);
    adapt(&f, a, b, whole, err, abs_tol, 0)
}

/// Time-ordered double integral
/// `int_0^tau dt1 outer(t1) int_0^t1 dt2 inner(t2)`.
pub fn integrate_time_ordered<F, G>(outer: F, inner: G, tau: f64, abs_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    let inner_tol = 0.1 * abs_tol / tau.max(1.0);
    let failure = std::cell::RefCell::new(None);
    let value = integrate(
        |t1| match integrate(&inner, 0.0, t1, inner_tol) {
            Ok(v) => outer(t1) * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        tau,
        abs_tol,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}
