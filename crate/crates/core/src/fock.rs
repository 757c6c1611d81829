//! Truncated multi-mode bosonic Fock space.
//!
//! Basis vectors are ordered lexicographically by their occupation tuple,
//! with the first registered mode most significant. The flat amplitude index
//! of `(n_0, n_1, ..., n_k)` is therefore `sum_j n_j * stride_j` where the
//! last mode has stride 1.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, ZwmError};

/// Largest basis the library will allocate amplitudes for.
pub const MAX_BASIS_LEN: usize = 1 << 28;

/// Default bound on discarded probability when a state is truncated.
pub const DEFAULT_TRUNCATION_BOUND: f64 = 1e-10;

/// Field modes of the two-crystal interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Pump1,
    Pump2,
    Signal1,
    Signal2,
    /// Shared idler mode; the idler of the first crystal is aligned with
    /// the idler of the second.
    Idler,
    /// Loss port of the idler filter between the crystals.
    Loss,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Pump1,
        Mode::Pump2,
        Mode::Signal1,
        Mode::Signal2,
        Mode::Idler,
        Mode::Loss,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Pump1 => "P1",
            Mode::Pump2 => "P2",
            Mode::Signal1 => "S1",
            Mode::Signal2 => "S2",
            Mode::Idler => "I",
            Mode::Loss => "L",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Ordered set of modes with per-mode occupation cutoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<Mode>,
    cutoffs: Vec<u32>,
    strides: Vec<usize>,
    len: usize,
}

impl ModeRegistry {
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mode, u32)>,
    {
        let mut modes = Vec::new();
        let mut cutoffs = Vec::new();
        for (mode, cutoff) in entries {
            if modes.contains(&mode) {
                return Err(ZwmError::DuplicateMode(mode));
            }
            modes.push(mode);
            cutoffs.push(cutoff);
        }

        let mut strides = vec![0usize; modes.len()];
        let mut len: usize = 1;
        for k in (0..modes.len()).rev() {
            strides[k] = len;
            let dim = (cutoffs[k] as usize).checked_add(1);
            len = dim
                .and_then(|d| len.checked_mul(d))
                .ok_or_else(|| ZwmError::Sizing("basis size overflows the index space".into()))?;
        }
        if len > MAX_BASIS_LEN {
            return Err(ZwmError::Sizing(format!(
                "basis of {len} vectors exceeds the limit of {MAX_BASIS_LEN}"
            )));
        }

        Ok(Self {
            modes,
            cutoffs,
            strides,
            len,
        })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn cutoffs(&self) -> &[u32] {
        &self.cutoffs
    }

    /// Number of basis vectors, the product of `cutoff + 1` over all modes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }

    pub fn position(&self, mode: Mode) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or(ZwmError::UnknownMode(mode))
    }

    pub fn cutoff(&self, mode: Mode) -> Result<u32> {
        Ok(self.cutoffs[self.position(mode)?])
    }

    pub fn stride(&self, position: usize) -> usize {
        self.strides[position]
    }

    /// Same modes with every cutoff multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Result<Self> {
        Self::new(
            self.modes
                .iter()
                .zip(&self.cutoffs)
                .map(|(&m, &c)| (m, c.saturating_mul(factor))),
        )
    }

    /// Occupation of the mode at `position` in the basis vector at `index`.
    #[inline]
    pub fn occupation_at(&self, index: usize, position: usize) -> u32 {
        ((index / self.strides[position]) % (self.cutoffs[position] as usize + 1)) as u32
    }

    pub fn basis_vector(&self, index: usize) -> FockBasisVector {
        FockBasisVector {
            occupations: (0..self.modes.len()).map(|p| self.occupation_at(index, p)).collect(),
        }
    }

    pub fn index_of(&self, occupations: &[u32]) -> Result<usize> {
        if occupations.len() != self.modes.len() {
            return Err(ZwmError::RegistryMismatch);
        }
        let mut index = 0;
        for (k, &n) in occupations.iter().enumerate() {
            if n > self.cutoffs[k] {
                return Err(ZwmError::OccupationOutOfRange {
                    mode: self.modes[k],
                    occupation: n,
                    cutoff: self.cutoffs[k],
                });
            }
            index += n as usize * self.strides[k];
        }
        Ok(index)
    }

    /// Flat index of a basis vector given as `(mode, occupation)` pairs;
    /// unlisted modes are empty.
    pub fn index_of_modes(&self, occupied: &[(Mode, u32)]) -> Result<usize> {
        let mut occupations = vec![0; self.modes.len()];
        for &(mode, n) in occupied {
            occupations[self.position(mode)?] = n;
        }
        self.index_of(&occupations)
    }
}

/// One occupation-number tuple over a registry, in registry order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockBasisVector {
    pub occupations: Vec<u32>,
}

impl fmt::Display for FockBasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (k, n) in self.occupations.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

/// All basis vectors of the registry in lexicographic order.
pub fn enumerate_basis(registry: &ModeRegistry) -> Vec<FockBasisVector> {
    (0..registry.len()).map(|i| registry.basis_vector(i)).collect()
}

/// Pure state on a truncated registry.
///
/// `truncation_loss` accumulates the squared norm dropped by creation
/// operators acting at a cutoff and by state preparation, so leakage out of
/// the truncated space stays visible.
#[derive(Debug, Clone)]
pub struct StateVector {
    registry: Arc<ModeRegistry>,
    amplitudes: Vec<Complex64>,
    truncation_loss: f64,
}

impl StateVector {
    pub fn zeros(registry: Arc<ModeRegistry>) -> Self {
        let amplitudes = vec![Complex64::new(0.0, 0.0); registry.len()];
        Self {
            registry,
            amplitudes,
            truncation_loss: 0.0,
        }
    }

    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut state = Self::zeros(registry);
        state.amplitudes[0] = Complex64::new(1.0, 0.0);
        state
    }

    /// Fock state with the given occupations (other modes empty).
    pub fn fock(registry: Arc<ModeRegistry>, occupied: &[(Mode, u32)]) -> Result<Self> {
        let index = registry.index_of_modes(occupied)?;
        let mut state = Self::zeros(registry);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(registry: Arc<ModeRegistry>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != registry.len() {
            return Err(ZwmError::Sizing(format!(
                "{} amplitudes for a basis of {} vectors",
                amplitudes.len(),
                registry.len()
            )));
        }
        Ok(Self {
            registry,
            amplitudes,
            truncation_loss: 0.0,
        })
    }

    /// Product state: each listed mode carries the given single-mode
    /// amplitudes (indexed by photon number), unlisted modes are vacuum.
    pub fn product(registry: Arc<ModeRegistry>, factors: &[(Mode, &[Complex64])]) -> Result<Self> {
        let mut per_mode: Vec<Option<&[Complex64]>> = vec![None; registry.modes().len()];
        for &(mode, amps) in factors {
            let pos = registry.position(mode)?;
            let cutoff = registry.cutoffs()[pos];
            if amps.len() > cutoff as usize + 1 {
                return Err(ZwmError::OccupationOutOfRange {
                    mode,
                    occupation: amps.len() as u32 - 1,
                    cutoff,
                });
            }
            per_mode[pos] = Some(amps);
        }

        let mut amplitudes = Vec::with_capacity(registry.len());
        for index in 0..registry.len() {
            let mut amp = Complex64::new(1.0, 0.0);
            for (pos, factor) in per_mode.iter().enumerate() {
                let n = registry.occupation_at(index, pos) as usize;
                amp *= match factor {
                    Some(a) => a.get(n).copied().unwrap_or_default(),
                    None if n == 0 => Complex64::new(1.0, 0.0),
                    None => Complex64::new(0.0, 0.0),
                };
                if amp == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            amplitudes.push(amp);
        }
        Self::from_amplitudes(registry, amplitudes)
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, occupied: &[(Mode, u32)]) -> Result<Complex64> {
        Ok(self.amplitudes[self.registry.index_of_modes(occupied)?])
    }

    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn with_truncation_loss(mut self, loss: f64) -> Self {
        self.truncation_loss = loss;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns the normalized state together with the squared norm it had.
    pub fn normalized(&self) -> Result<(Self, f64)> {
        let norm_sqr = self.norm_sqr();
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(ZwmError::Config(format!(
                "cannot normalize a state with squared norm {norm_sqr}"
            )));
        }
        let scale = 1.0 / norm_sqr.sqrt();
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok((out, norm_sqr))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a *= factor);
        out
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &StateVector, b: Complex64) -> Result<Self> {
        self.check_registry(other)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            registry: Arc::clone(&self.registry),
            amplitudes,
            truncation_loss: self.truncation_loss + other.truncation_loss,
        })
    }

    /// Euclidean norm of `self - other`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_registry(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        inner_product(self, other)
    }

    pub(crate) fn check_registry(&self, other: &StateVector) -> Result<()> {
        if Arc::ptr_eq(&self.registry, &other.registry) || *self.registry == *other.registry {
            Ok(())
        } else {
            Err(ZwmError::RegistryMismatch)
        }
    }

    pub(crate) fn from_parts(registry: Arc<ModeRegistry>, amplitudes: Vec<Complex64>, truncation_loss: f64) -> Self {
        debug_assert_eq!(amplitudes.len(), registry.len());
        Self {
            registry,
            amplitudes,
            truncation_loss,
        }
    }
}

/// `<x|y>`, conjugate-linear in `x`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<Complex64> {
    x.check_registry(y)?;
    Ok(x.amplitudes.iter().zip(&y.amplitudes).map(|(a, b)| a.conj() * b).sum())
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Poisson tail mass `sum_{n > cutoff} e^{-m} m^n / n!` for mean `m`.
fn poisson_tail(mean: f64, cutoff: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut n = cutoff + 1;
    let mut ln_term = -mean + n as f64 * mean.ln() - ln_factorial(n);
    let mut tail = 0.0;
    loop {
        let term = ln_term.exp();
        tail += term;
        // past the mode of the distribution the terms only shrink
        if (n as f64) > mean && (term <= tail * 1e-17 || term == 0.0) {
            break;
        }
        n += 1;
        ln_term += mean.ln() - (n as f64).ln();
    }
    tail
}

/// Smallest cutoff whose coherent-state tail mass is below `tail_bound`.
pub fn coherent_cutoff(alpha: Complex64, tail_bound: f64) -> u32 {
    let mean = alpha.norm_sqr();
    let mut cutoff = 0;
    while poisson_tail(mean, cutoff) >= tail_bound {
        cutoff += 1;
    }
    cutoff
}

/// Truncated coherent-state amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for
/// `n <= cutoff`, renormalized, together with the discarded tail mass.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: u32) -> (Vec<Complex64>, f64) {
    let mean = alpha.norm_sqr();
    if mean == 0.0 {
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff as usize + 1];
        amps[0] = Complex64::new(1.0, 0.0);
        return (amps, 0.0);
    }
    let (r, theta) = alpha.to_polar();
    let mut amps = Vec::with_capacity(cutoff as usize + 1);
    let mut ln_fact = 0.0;
    for n in 0..=cutoff {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let magnitude = (-mean / 2.0 + n as f64 * r.ln() - 0.5 * ln_fact).exp();
        amps.push(Complex64::from_polar(magnitude, n as f64 * theta));
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let scale = 1.0 / kept.sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
    (amps, poisson_tail(mean, cutoff))
}

/// Coherent state `|alpha>` in `mode` (all other modes vacuum), truncated
/// at `cutoff` photons and renormalized.
pub fn coherent_state(registry: Arc<ModeRegistry>, mode: Mode, alpha: Complex64, cutoff: u32) -> Result<StateVector> {
    coherent_state_with_bound(registry, mode, alpha, cutoff, DEFAULT_TRUNCATION_BOUND)
}

pub fn coherent_state_with_bound(
    registry: Arc<ModeRegistry>,
    mode: Mode,
    alpha: Complex64,
    cutoff: u32,
    bound: f64,
) -> Result<StateVector> {
    let mode_cutoff = registry.cutoff(mode)?;
    if cutoff > mode_cutoff {
        return Err(ZwmError::Sizing(format!(
            "coherent cutoff {cutoff} exceeds the registry cutoff {mode_cutoff} of {mode}"
        )));
    }
    let (amps, tail) = coherent_amplitudes(alpha, cutoff);
    if tail > bound {
        return Err(ZwmError::Sizing(format!(
            "|alpha|^2 = {} needs more than {cutoff} photons: tail mass {tail:.3e} > {bound:.3e}",
            alpha.norm_sqr()
        )));
    }
    Ok(StateVector::product(registry, &[(mode, &amps)])?.with_truncation_loss(tail))
}

/// Marginal photon-number distribution `P(n)` of one mode, `n = 0..=cutoff`.
pub fn photon_number_distribution(state: &StateVector, mode: Mode) -> Result<Vec<f64>> {
    let registry = state.registry();
    let pos = registry.position(mode)?;
    let mut dist = vec![0.0; registry.cutoffs()[pos] as usize + 1];
    for (index, amp) in state.amplitudes().iter().enumerate() {
        dist[registry.occupation_at(index, pos) as usize] += amp.norm_sqr();
    }
    Ok(dist)
}
