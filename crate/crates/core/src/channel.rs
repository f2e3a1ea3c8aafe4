//! BPSK over AWGN and soft-value to bit-probability conversion.
//!
//! Bit 0 maps to -1 and bit 1 to +1, so `P(bit = 1 | y) = 1 / (1 + e^{-2y/σ²})`.
//! SNR is `E_s/σ²` per real dimension with unit symbol energy.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Real, Result};

/// Received soft values together with the channel noise level.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftVector<T> {
    y: Vec<T>,
    sigma: T,
}

impl<T: Real> SoftVector<T> {
    pub fn new(y: Vec<T>, sigma: T) -> Result<Self> {
        if sigma <= T::zero() || !sigma.is_finite() {
            return Err(Error::InvalidSigma(sigma.as_f64()));
        }
        Ok(SoftVector { y, sigma })
    }

    pub fn values(&self) -> &[T] {
        &self.y
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Channel LLR `2y/σ²` per position, oriented so positive favours bit 1.
    pub fn llrs(&self) -> Vec<T> {
        let scale = T::of(2.0) / (self.sigma * self.sigma);
        self.y.iter().map(|&y| y * scale).collect()
    }
}

/// Per-bit probabilities of a one, stored with their complements so both
/// tails stay accurate near saturation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector<T> {
    one: Vec<T>,
    zero: Vec<T>,
}

impl<T: Real> ProbVector<T> {
    /// From `P(bit = 1)` values; each must lie in `[0, 1]`.
    pub fn new(p_one: Vec<T>) -> Result<Self> {
        if let Some(&bad) = p_one.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
            return Err(Error::InvalidProbability(bad.as_f64()));
        }
        let zero = p_one.iter().map(|&p| T::one() - p).collect();
        Ok(ProbVector { one: p_one, zero })
    }

    pub fn from_soft(y: &SoftVector<T>) -> Self {
        let (one, zero) = y.llrs().into_iter().map(logistic_pair).unzip();
        ProbVector { one, zero }
    }

    /// Probabilities loaded by `Ry(θ_i)` on `|0⟩`: `sin²(θ/2)` and `cos²(θ/2)`.
    pub fn from_angles(thetas: &[T]) -> Self {
        let half = T::of(0.5);
        let (one, zero) = thetas
            .iter()
            .map(|&t| {
                let (s, c) = (t * half).sin_cos();
                (s * s, c * c)
            })
            .unzip();
        ProbVector { one, zero }
    }

    pub fn p_one(&self) -> &[T] {
        &self.one
    }

    pub fn p_zero(&self) -> &[T] {
        &self.zero
    }

    pub fn len(&self) -> usize {
        self.one.len()
    }

    pub fn is_empty(&self) -> bool {
        self.one.is_empty()
    }

    /// `Π_i p_i^{x_i} (1 - p_i)^{1 - x_i}`.
    pub fn likelihood(&self, x: &[u8]) -> T {
        x.iter()
            .enumerate()
            .fold(T::one(), |acc, (i, &b)| acc * if b == 1 { self.one[i] } else { self.zero[i] })
    }
}

/// `(1/(1+e^{-a}), 1/(1+e^{a}))` without overflow.
fn logistic_pair<T: Real>(a: T) -> (T, T) {
    let one = T::one();
    if a >= T::zero() {
        let e = (-a).exp();
        (one / (one + e), e / (one + e))
    } else {
        let e = a.exp();
        (e / (one + e), one / (one + e))
    }
}

pub fn modulate_bpsk<T: Real>(x: &[u8]) -> Vec<T> {
    x.iter().map(|&b| if b == 1 { T::one() } else { -T::one() }).collect()
}

/// Adds i.i.d. `N(0, σ²)` noise to each symbol.
pub fn transmit<T: Real, R: Rng + ?Sized>(
    symbols: &[T],
    sigma: T,
    rng: &mut R,
) -> Result<SoftVector<T>> {
    if sigma <= T::zero() || !sigma.is_finite() {
        return Err(Error::InvalidSigma(sigma.as_f64()));
    }
    let y = symbols
        .iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + sigma * T::of(z)
        })
        .collect();
    SoftVector::new(y, sigma)
}

/// `1 / (1 + e^{-2y/σ²})`, saturating to 0 or 1 at extreme magnitudes.
pub fn bit_prob_one<T: Real>(y: T, sigma: T) -> T {
    logistic_pair(T::of(2.0) * y / (sigma * sigma)).0
}

/// Noise standard deviation for `snr_db = 10 log10(E_s/σ²)` with `E_s = 1`.
pub fn snr_db_to_sigma<T: Real>(snr_db: T) -> T {
    T::of(10.0).powf(-snr_db / T::of(20.0))
}
