use std::f64::consts::TAU;

use super::observables::{detection_rate, phi_in};
use super::ZwmOutput;
use crate::error::{Result, ZwmError};

/// Amplitude-to-offset ratio below which a fringe counts as flat.
const DEGENERATE_CONTRAST: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringePoint {
    pub phi_s: f64,
    pub phi_in: f64,
    pub rate: f64,
}

/// Detection rate at each signal phase. The output state does not depend on
/// `phi_s`, so one cascade serves the whole scan.
pub fn fringe_scan(output: &ZwmOutput, phi_s_values: &[f64]) -> Result<Vec<FringePoint>> {
    let offset = phi_in(&output.config) - output.config.phi_s;
    phi_s_values
        .iter()
        .map(|&phi_s| {
            Ok(FringePoint {
                phi_s,
                phi_in: phi_s + offset,
                rate: detection_rate(output, phi_s)?,
            })
        })
        .collect()
}

/// Least-squares fit `R = offset + amplitude cos(phi_in - phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub offset: f64,
    pub amplitude: f64,
    /// `phi_in` at the fringe maximum, wrapped to `(-pi, pi]`.
    pub phase: f64,
    /// `amplitude / offset`, i.e. `(max - min) / (max + min)` of the fitted curve.
    pub visibility: f64,
    /// Largest absolute deviation of a sample from the fit.
    pub max_residual: f64,
    /// The scan is flat; visibility is reported as 0.
    pub degenerate: bool,
}

impl FringeFit {
    pub fn relative_residual(&self) -> f64 {
        if self.offset > 0.0 {
            self.max_residual / self.offset
        } else {
            self.max_residual
        }
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for k in 0..3 {
        let pivot = (k..3).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, pivot);
        b.swap(k, pivot);
        let (upper, lower) = a.split_at_mut(k + 1);
        let row_k = upper[k];
        for (i, row) in lower.iter_mut().enumerate() {
            let f = row[k] / row_k[k];
            for (x, y) in row[k..].iter_mut().zip(&row_k[k..]) {
                *x -= f * y;
            }
            b[k + 1 + i] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Cosine fit of a fringe scan.
///
/// The scan must cover a full period: `n` samples spanning at least
/// `2 pi (n - 1) / n` in `phi_in`.
pub fn fit_fringe(points: &[FringePoint]) -> Result<FringeFit> {
    let n = points.len();
    if n < 3 {
        return Err(ZwmError::Config(format!(
            "a fringe fit needs at least 3 points, got {n}"
        )));
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.phi_in), hi.max(p.phi_in))
    });
    let needed = TAU * (n - 1) as f64 / n as f64;
    if hi - lo < needed - 1e-9 {
        return Err(ZwmError::Config(format!(
            "fringe scan spans {:.4} rad, less than one period ({needed:.4} rad for {n} points)",
            hi - lo
        )));
    }

    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for p in points {
        let row = [1.0, p.phi_in.cos(), p.phi_in.sin()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * p.rate;
        }
    }
    let [c, a, b] =
        solve3(ata, atb).ok_or_else(|| ZwmError::Config("fringe samples do not determine a cosine".into()))?;
    let amplitude = a.hypot(b);
    let phase = b.atan2(a);
    let max_residual = points
        .iter()
        .map(|p| (p.rate - (c + a * p.phi_in.cos() + b * p.phi_in.sin())).abs())
        .fold(0.0, f64::max);

    let degenerate = amplitude <= DEGENERATE_CONTRAST * c.abs() || c <= 0.0;
    let visibility = if degenerate { 0.0 } else { amplitude / c };
    Ok(FringeFit {
        offset: c,
        amplitude,
        phase,
        visibility,
        max_residual,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scan(n: usize, f: impl Fn(f64) -> f64) -> Vec<FringePoint> {
        (0..n)
            .map(|k| {
                let phi = -1.0 + TAU * k as f64 / n as f64;
                FringePoint {
                    phi_s: phi,
                    phi_in: phi,
                    rate: f(phi),
                }
            })
            .collect()
    }

    #[test]
    fn recovers_cosine() {
        let fit = fit_fringe(&scan(32, |p| 3.0 + 1.5 * (p - 0.4).cos())).unwrap();
        assert_abs_diff_eq!(fit.offset, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.visibility, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.phase, 0.4, epsilon = 1e-14);
        assert!(fit.max_residual < 1e-14);
    }

    #[test]
    fn flat_scan_is_degenerate() {
        let fit = fit_fringe(&scan(16, |_| 0.7)).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.visibility, 0.0);
    }

    #[test]
    fn short_scan_is_rejected() {
        let points: Vec<_> = scan(16, |p| p.cos()).into_iter().take(8).collect();
        assert!(matches!(fit_fringe(&points), Err(ZwmError::Config(_))));
    }
}
