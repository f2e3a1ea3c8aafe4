//! Brute-force maximum-likelihood reference decoder.

use crate::channel::{ProbVector, SoftVector};
use crate::polar::PolarCode;
use crate::{Error, Real, Result};

/// Floor applied to per-bit log-probabilities, `ln(1e-300)`.
const LOG_PROB_FLOOR: f64 = -690.775_527_898_213_7;

#[derive(Clone, Debug, PartialEq)]
pub struct MlDecision<T> {
    /// Message integer (`m_j` is bit `j`).
    pub message_index: usize,
    pub m_hat: Vec<u8>,
    pub u_hat: Vec<u8>,
    /// `Σ_i ln P(x_i | y_i)` of the winning codeword.
    pub log_likelihood: T,
    /// Winner minus runner-up log-likelihood (0 for a tie).
    pub runner_up_gap: T,
}

/// `ln(1 + e^z)` without overflow.
fn softplus<T: Real>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// Per-bit `(ln P(1|y), ln P(0|y))`, floored at `ln(1e-300)`.
pub fn bit_log_probs<T: Real>(y: &SoftVector<T>) -> Vec<(T, T)> {
    let floor = T::of(LOG_PROB_FLOOR);
    y.llrs()
        .into_iter()
        .map(|a| ((-softplus(-a)).max(floor), (-softplus(a)).max(floor)))
        .collect()
}

fn log_likelihood<T: Real>(logp: &[(T, T)], x: &[u8]) -> T {
    x.iter()
        .zip(logp)
        .fold(T::zero(), |acc, (&b, &(l1, l0))| acc + if b == 1 { l1 } else { l0 })
}

/// Exhaustive ML decision over all `2^k` codewords; ties go to the lowest
/// message integer.
pub fn ml_decode<T: Real>(code: &PolarCode, y: &SoftVector<T>) -> Result<MlDecision<T>> {
    if y.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: y.len() });
    }
    let logp = bit_log_probs(y);
    let book = code.codebook()?;
    let (mut best, mut best_ll, mut second_ll) = (0usize, T::neg_infinity(), T::neg_infinity());
    for (idx, x) in book.iter().enumerate() {
        let ll = log_likelihood(&logp, x);
        if ll > best_ll {
            second_ll = best_ll;
            best_ll = ll;
            best = idx;
        } else if ll > second_ll {
            second_ll = ll;
        }
    }
    let m_hat = code.message_from_index(best);
    let u_hat = code.input_vector(&m_hat)?;
    let gap = if second_ll.is_finite() { best_ll - second_ll } else { T::infinity() };
    Ok(MlDecision { message_index: best, m_hat, u_hat, log_likelihood: best_ll, runner_up_gap: gap })
}

/// Normalized `Π_i p_i^{x_i}(1-p_i)^{1-x_i}` over the codebook, indexed by
/// message integer.
pub fn posterior_over_valid<T: Real>(code: &PolarCode, p: &ProbVector<T>) -> Result<Vec<T>> {
    if p.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: p.len() });
    }
    let logp: Vec<(T, T)> = p.p_one().iter().zip(p.p_zero()).map(|(a, b)| (a.ln(), b.ln())).collect();
    let lls: Vec<T> = code.codebook()?.iter().map(|x| log_likelihood(&logp, x)).collect();
    let top = lls.iter().copied().fold(T::neg_infinity(), T::max);
    if !top.is_finite() {
        return Err(Error::DegeneratePosterior);
    }
    let weights: Vec<T> = lls.iter().map(|&l| (l - top).exp()).collect();
    let total = weights.iter().fold(T::zero(), |a, &w| a + w);
    Ok(weights.into_iter().map(|w| w / total).collect())
}
