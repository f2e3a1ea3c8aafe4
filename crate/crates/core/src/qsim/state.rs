use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;

use super::Gate;
use crate::{Error, Real, Result};

pub const MAX_QUBITS: usize = 24;

/// Dense `2^n` amplitude vector. Basis index `i` encodes `|q_{n-1} … q_1 q_0⟩`
/// with `q_0` as the least-significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Validates the gate, then applies it.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate<T>) {
        match gate {
            Gate::X(q) => self.x(*q),
            Gate::Z(q) => {
                let bit = 1 << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::P { qubit, lambda } => self.phase_on_mask(1 << qubit, *lambda),
            Gate::Ry { qubit, theta } => {
                let (s, c) = (*theta * T::of(0.5)).sin_cos();
                let bit = 1 << qubit;
                for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
                    let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = a0.scale(c) - a1.scale(s);
                    self.amps[i | bit] = a0.scale(s) + a1.scale(c);
                }
            }
            Gate::Cnot { control, target } => {
                let (cb, tb) = (1 << control, 1 << target);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::McPhase { controls, target, lambda } => {
                let mask = controls.iter().fold(1 << target, |m, c| m | (1 << c));
                self.phase_on_mask(mask, *lambda);
            }
        }
    }

    #[inline]
    pub(crate) fn x(&mut self, q: usize) {
        let bit = 1 << q;
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            self.amps.swap(i, i | bit);
        }
    }

    fn phase_on_mask(&mut self, mask: usize, lambda: T) {
        let phase = Complex::from_polar(T::one(), lambda);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    /// Probability that every qubit flagged in `frozen_mask` reads 0.
    pub fn subspace_probability(&self, frozen_mask: &[bool]) -> Result<T> {
        if frozen_mask.len() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, actual: frozen_mask.len() });
        }
        let mask = frozen_bits(frozen_mask);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Draws `shots` i.i.d. measurements of all qubits.
    pub fn measure_shots<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let cdf = self.cdf()?;
        let mut hist = Histogram::default();
        for _ in 0..shots {
            hist.record(sample_cdf(&cdf, rng));
        }
        Ok(hist)
    }

    /// Cumulative distribution over basis states, renormalized to end at 1.
    pub(crate) fn cdf(&self) -> Result<Vec<f64>> {
        let norm = self.norm_sqr().as_f64();
        let tol = 1e-6f64.max(T::epsilon().as_f64() * self.dim() as f64 * 4.0);
        if (norm - 1.0).abs() > tol {
            return Err(Error::Unnormalized(norm));
        }
        let mut acc = 0.0f64;
        Ok(self
            .amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr().as_f64();
                acc / norm
            })
            .collect())
    }
}

pub(crate) fn frozen_bits(frozen_mask: &[bool]) -> usize {
    frozen_mask.iter().enumerate().filter(|(_, f)| **f).fold(0, |m, (i, _)| m | (1 << i))
}

pub(crate) fn sample_cdf<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.random();
    cdf.partition_point(|&c| c <= r).min(cdf.len() - 1)
}

/// Measurement counts keyed by basis-state index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram(BTreeMap<usize, u64>);

impl Histogram {
    pub fn record(&mut self, index: usize) {
        *self.0.entry(index).or_insert(0) += 1;
    }

    pub fn count(&self, index: usize) -> u64 {
        self.0.get(&index).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    /// Most frequent index; ties go to the lowest index.
    pub fn mode(&self) -> Option<usize> {
        self.0
            .iter()
            .fold(None, |best: Option<(usize, u64)>, (&i, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((i, c)),
            })
            .map(|(i, _)| i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(&i, &c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
