//! Linear combinations of ladder-operator products acting on truncated states.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Result, ZwmError};
use crate::fock::{Mode, ModeRegistry, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderFactor {
    pub mode: Mode,
    pub action: Ladder,
}

impl LadderFactor {
    pub fn create(mode: Mode) -> Self {
        Self {
            mode,
            action: Ladder::Create,
        }
    }

    pub fn annihilate(mode: Mode) -> Self {
        Self {
            mode,
            action: Ladder::Annihilate,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            mode: self.mode,
            action: match self.action {
                Ladder::Create => Ladder::Annihilate,
                Ladder::Annihilate => Ladder::Create,
            },
        }
    }
}

impl fmt::Display for LadderFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.action {
            Ladder::Create => write!(f, "a+_{}", self.mode),
            Ladder::Annihilate => write!(f, "a_{}", self.mode),
        }
    }
}

/// `coeff * f_0 f_1 ... f_k`, written in operator order: the rightmost
/// factor acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    pub coeff: Complex64,
    pub factors: Vec<LadderFactor>,
}

impl OperatorTerm {
    pub fn new(coeff: Complex64, factors: Vec<LadderFactor>) -> Self {
        Self { coeff, factors }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            factors: self.factors.iter().rev().map(|f| f.adjoint()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorSum {
    terms: Vec<OperatorTerm>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_terms(vec![OperatorTerm::new(Complex64::new(1.0, 0.0), Vec::new())])
    }

    pub fn from_terms(terms: Vec<OperatorTerm>) -> Self {
        Self { terms }
    }

    pub fn create(mode: Mode) -> Self {
        Self::product(Complex64::new(1.0, 0.0), vec![LadderFactor::create(mode)])
    }

    pub fn annihilate(mode: Mode) -> Self {
        Self::product(Complex64::new(1.0, 0.0), vec![LadderFactor::annihilate(mode)])
    }

    pub fn number(mode: Mode) -> Self {
        Self::product(
            Complex64::new(1.0, 0.0),
            vec![LadderFactor::create(mode), LadderFactor::annihilate(mode)],
        )
    }

    pub fn product(coeff: Complex64, factors: Vec<LadderFactor>) -> Self {
        Self::from_terms(vec![OperatorTerm::new(coeff, factors)])
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| OperatorTerm::new(t.coeff * factor, t.factors.clone()))
                .collect(),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(OperatorTerm::adjoint).collect())
    }

    fn check_modes(&self, registry: &ModeRegistry) -> Result<()> {
        for term in &self.terms {
            for f in &term.factors {
                if !registry.contains(f.mode) {
                    return Err(ZwmError::UnknownMode(f.mode));
                }
            }
        }
        Ok(())
    }

    /// Applies the operator to `state`.
    ///
    /// Creation on a mode already at its cutoff drops that component. The
    /// dropped amplitudes are collected per out-of-space basis vector, so
    /// contributions from different terms interfere, and their squared norm
    /// is added to the result's truncation loss. A component that another
    /// factor of the same term annihilates is not counted.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let registry = state.registry();
        self.check_modes(registry)?;
        let zero = Complex64::new(0.0, 0.0);
        let mut result = vec![zero; registry.len()];
        let mut overflow: HashMap<Vec<u32>, Complex64> = HashMap::new();

        for term in &self.terms {
            if term.coeff == zero {
                continue;
            }
            let tables = mode_tables(registry, term)?;
            'basis: for (index, &amp) in state.amplitudes().iter().enumerate() {
                if amp == zero {
                    continue;
                }
                let mut target = index;
                let mut value = term.coeff * amp;
                let mut outside = false;
                for table in &tables {
                    let n = registry.occupation_at(index, table.pos) as usize;
                    let Some(step) = table.steps[n] else {
                        continue 'basis;
                    };
                    value *= step.coeff;
                    outside |= step.outside;
                    if !step.outside {
                        target = target + step.occupation as usize * table.stride - n * table.stride;
                    }
                }
                if outside {
                    let mut key = registry.basis_vector(index).occupations;
                    for table in &tables {
                        let n = key[table.pos] as usize;
                        if let Some(step) = table.steps[n] {
                            key[table.pos] = step.occupation;
                        }
                    }
                    *overflow.entry(key).or_insert(zero) += value;
                } else {
                    result[target] += value;
                }
            }
        }

        let dropped: f64 = overflow.values().map(|a| a.norm_sqr()).sum();
        Ok(StateVector::from_parts(
            Arc::clone(registry),
            result,
            state.truncation_loss() + dropped,
        ))
    }

    /// `<state| op |state>`.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        let image = self.apply(state)?;
        state.inner(&image)
    }

    /// Dense matrix of the operator on the registry's truncated basis.
    pub fn to_dense(&self, registry: &ModeRegistry) -> Result<Array2<Complex64>> {
        self.check_modes(registry)?;
        let positions: Vec<Vec<(usize, Ladder)>> = self
            .terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .rev()
                    .map(|f| Ok((registry.position(f.mode)?, f.action)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let len = registry.len();
        let mut matrix = Array2::zeros((len, len));
        for col in 0..len {
            'terms: for (term, factors) in self.terms.iter().zip(&positions) {
                let mut index = col;
                let mut amp = term.coeff;
                for &(pos, action) in factors {
                    let n = registry.occupation_at(index, pos);
                    let stride = registry.stride(pos);
                    match action {
                        Ladder::Annihilate => {
                            if n == 0 {
                                continue 'terms;
                            }
                            amp *= (n as f64).sqrt();
                            index -= stride;
                        }
                        Ladder::Create => {
                            if n == registry.cutoffs()[pos] {
                                continue 'terms;
                            }
                            amp *= (n as f64 + 1.0).sqrt();
                            index += stride;
                        }
                    }
                }
                matrix[[index, col]] += amp;
            }
        }
        Ok(matrix)
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    occupation: u32,
    coeff: f64,
    /// Some intermediate or final occupation exceeds the cutoff.
    outside: bool,
}

/// Action of one term's factors on a single mode, tabulated by input
/// occupation. `None` means the factors annihilate that occupation.
struct ModeTable {
    pos: usize,
    stride: usize,
    steps: Vec<Option<Step>>,
}

fn mode_tables(registry: &ModeRegistry, term: &OperatorTerm) -> Result<Vec<ModeTable>> {
    let mut groups: Vec<(usize, Vec<Ladder>)> = Vec::new();
    for factor in term.factors.iter().rev() {
        let pos = registry.position(factor.mode)?;
        match groups.iter_mut().find(|(p, _)| *p == pos) {
            Some((_, actions)) => actions.push(factor.action),
            None => groups.push((pos, vec![factor.action])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(pos, actions)| {
            let cutoff = registry.cutoffs()[pos];
            let steps = (0..=cutoff)
                .map(|n0| {
                    let mut n = n0;
                    let mut coeff = 1.0;
                    let mut outside = false;
                    for action in &actions {
                        match action {
                            Ladder::Annihilate => {
                                if n == 0 {
                                    return None;
                                }
                                coeff *= (n as f64).sqrt();
                                n -= 1;
                            }
                            Ladder::Create => {
                                n += 1;
                                coeff *= (n as f64).sqrt();
                                outside |= n > cutoff;
                            }
                        }
                    }
                    Some(Step {
                        occupation: n,
                        coeff,
                        outside,
                    })
                })
                .collect();
            ModeTable {
                pos,
                stride: registry.stride(pos),
                steps,
            }
        })
        .collect())
}

/// Free-function form of [`OperatorSum::apply`].
pub fn apply_ladder(op: &OperatorSum, state: &StateVector) -> Result<StateVector> {
    op.apply(state)
}

/// Free-function form of [`OperatorSum::expectation`].
pub fn expectation(op: &OperatorSum, state: &StateVector) -> Result<Complex64> {
    op.expectation(state)
}

impl Add for OperatorSum {
    type Output = OperatorSum;

    fn add(mut self, rhs: OperatorSum) -> OperatorSum {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Mul for &OperatorSum {
    type Output = OperatorSum;

    /// Operator product `self * rhs` (rhs acts first).
    fn mul(self, rhs: &OperatorSum) -> OperatorSum {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut factors = a.factors.clone();
                factors.extend_from_slice(&b.factors);
                terms.push(OperatorTerm::new(a.coeff * b.coeff, factors));
            }
        }
        OperatorSum::from_terms(terms)
    }
}

impl Mul for OperatorSum {
    type Output = OperatorSum;

    fn mul(self, rhs: OperatorSum) -> OperatorSum {
        &self * &rhs
    }
}

impl Mul<Complex64> for OperatorSum {
    type Output = OperatorSum;

    fn mul(self, rhs: Complex64) -> OperatorSum {
        self.scale(rhs)
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6e}{:+.6e}i)", t.coeff.re, t.coeff.im)?;
            for factor in &t.factors {
                write!(f, " {factor}")?;
            }
        }
        Ok(())
    }
}
