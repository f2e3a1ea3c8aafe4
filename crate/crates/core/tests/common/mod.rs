#![allow(dead_code)]

use num_complex::Complex64;
use qgated_polar::channel::ProbVector;
use qgated_polar::polar::PolarCode;
use qgated_polar::qsim::{Gate, StateVector};
use qgated_polar::rng::SimRng;
use rand::Rng;

pub fn random_state(n: usize, rng: &mut SimRng) -> StateVector<f64> {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn basis_state(n: usize, index: usize) -> StateVector<f64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[index] = Complex64::new(1.0, 0.0);
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn max_abs_diff(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn apply_all(state: &mut StateVector<f64>, gates: &[Gate<f64>]) {
    for g in gates {
        state.apply(g).unwrap();
    }
}

/// Per-bit probabilities drawn uniformly from `[lo, 1 - lo]`.
pub fn random_probs(n: usize, lo: f64, rng: &mut SimRng) -> ProbVector<f64> {
    ProbVector::new((0..n).map(|_| rng.random_range(lo..1.0 - lo)).collect()).unwrap()
}

/// Probabilities of the valid basis states in message-index order,
/// normalized to sum to one.
pub fn valid_conditional(state: &StateVector<f64>, code: &PolarCode) -> Vec<f64> {
    let probs = state.probabilities();
    let raw: Vec<f64> = (0..1usize << code.k())
        .map(|j| probs[code.basis_index_of_message(j)])
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

pub fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| if *y == 0.0 { x.abs() } else { ((x - y) / y).abs() })
        .fold(0.0, f64::max)
}
