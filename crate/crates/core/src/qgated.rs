//! Decoder orchestration: angle loading, amplitude-amplification schedule,
//! circuit assembly, shot execution and the majority-vote decision.

use rand::Rng;

use crate::channel::{ProbVector, SoftVector};
use crate::circuit::{build_decoder_circuit, optimize, Circuit};
use crate::polar::{index_to_bits, PolarCode};
use crate::qsim::{Histogram, NoiseModel, ShotSampler, StateVector};
use crate::rng::stream;
use crate::{Error, Real, Result};

/// Slack on the arccos argument before the slow rotation is declared infeasible.
const PHASE_ARG_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderConfig {
    /// Cap on the number of FBS blocks (`m + 1`). Ignored in ideal mode.
    pub max_fbs_blocks: usize,
    /// `Ry` angle quantization step in radians; 0 disables. Ignored in ideal mode.
    pub angle_quantum: f64,
    pub shots: u64,
    /// Exact final distribution and argmax; no cap, no quantization, no noise.
    pub ideal_mode: bool,
    pub optimize_circuit: bool,
    /// FBS is skipped once the valid-subspace mass exceeds `1 - validity_epsilon`.
    pub validity_epsilon: f64,
    pub noise: NoiseModel,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_fbs_blocks: 5,
            angle_quantum: std::f64::consts::PI / 128.0,
            shots: 1000,
            ideal_mode: false,
            optimize_circuit: false,
            validity_epsilon: 1e-12,
            noise: NoiseModel::noiseless(),
        }
    }
}

impl DecoderConfig {
    pub fn ideal() -> Self {
        DecoderConfig { ideal_mode: true, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_fbs_blocks == 0 {
            return Err(Error::Config("max_fbs_blocks must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        if !(self.angle_quantum >= 0.0 && self.angle_quantum.is_finite()) {
            return Err(Error::Config(format!("angle quantum {} must be >= 0", self.angle_quantum)));
        }
        if !(self.validity_epsilon >= 0.0 && self.validity_epsilon < 1.0) {
            return Err(Error::Config("validity_epsilon must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Rounds to the nearest multiple of `step`, ties upward. `step = 0` is a no-op.
pub fn quantize_angle<T: Real>(theta: T, step: T) -> T {
    if step <= T::zero() {
        return theta;
    }
    (theta / step + T::of(0.5)).floor() * step
}

/// `θ_i = 2·arcsin(√p_i)`, optionally quantized. Evaluated as
/// `2·atan2(√p_i, √(1-p_i))` to keep both tails accurate.
pub fn compute_angles<T: Real>(p: &ProbVector<T>, quantum: T) -> Vec<T> {
    p.p_one()
        .iter()
        .zip(p.p_zero())
        .map(|(&one, &zero)| quantize_angle(T::of(2.0) * one.sqrt().atan2(zero.sqrt()), quantum))
        .collect()
}

/// Probability mass on valid states after initialization and reverse
/// traversal, by enumerating the `2^k` codewords.
pub fn valid_probability<T: Real>(p: &ProbVector<T>, code: &PolarCode) -> Result<T> {
    if p.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: p.len() });
    }
    let mass = code
        .codebook()?
        .iter()
        .fold(T::zero(), |acc, x| acc + p.likelihood(x));
    Ok(mass.min(T::one()))
}

/// `θ_RT = arcsin(√P_valid)` in `[0, π/2]`.
pub fn compute_theta_rt<T: Real>(p: &ProbVector<T>, code: &PolarCode) -> Result<T> {
    Ok(valid_probability(p, code)?.sqrt().asin())
}

/// `m = ⌈π/(4θ_RT) - 1/2⌉`, limited to `max_blocks - 1` when a cap is given.
pub fn compute_iterations<T: Real>(theta_rt: T, max_blocks: Option<usize>) -> Result<usize> {
    if !(theta_rt > T::zero() && theta_rt <= T::FRAC_PI_2()) {
        return Err(Error::AngleOutOfRange(theta_rt.as_f64()));
    }
    // the slack absorbs rounding at exact integers, e.g. θ = π/6
    let raw = (T::PI() / (T::of(4.0) * theta_rt) - T::of(0.5) - T::of(1e-9)).ceil();
    let m = raw.max(T::zero()).to_usize().unwrap_or(usize::MAX);
    Ok(match max_blocks {
        Some(cap) => m.min(cap.saturating_sub(1)),
        None => m,
    })
}

/// Phases `(λ₁, λ₂)` of the final slow rotation after `m` full iterations.
pub fn slow_rotation_phases<T: Real>(theta_rt: T, m: usize) -> Result<(T, T)> {
    if !(theta_rt > T::zero() && theta_rt < T::FRAC_PI_2()) {
        return Err(Error::AngleOutOfRange(theta_rt.as_f64()));
    }
    let two_theta = T::of(2.0) * theta_rt;
    let arg = -T::one() / (two_theta.tan() * (T::of((2 * m + 1) as f64) * theta_rt).tan());
    if !arg.is_finite() || arg.abs() > T::one() + T::of(PHASE_ARG_SLACK) {
        return Err(Error::PhaseOutOfRange(arg.as_f64()));
    }
    let lambda1 = arg.max(-T::one()).min(T::one()).acos();
    let denom = lambda1.sin() * two_theta.cos();
    let lambda2 = if denom == T::zero() {
        T::PI()
    } else {
        T::of(2.0) * (-lambda1.cos() / denom).atan()
    };
    Ok((lambda1, lambda2))
}

/// Amplitude-amplification schedule: `full_iterations` blocks at `(π, π)`
/// followed by one block at `slow`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationPlan<T> {
    pub full_iterations: usize,
    pub slow: (T, T),
    /// `m` was lowered by one because the slow rotation was infeasible at `m`.
    pub adjusted: bool,
    /// No feasible slow rotation; the last block also uses `(π, π)`.
    pub fallback: bool,
}

impl<T: Real> RotationPlan<T> {
    pub fn phases(&self) -> Vec<(T, T)> {
        let mut v = vec![(T::PI(), T::PI()); self.full_iterations];
        v.push(self.slow);
        v
    }

    pub fn blocks(&self) -> usize {
        self.full_iterations + 1
    }
}

/// Picks `m` and the slow-rotation phases for `θ_RT ∈ (0, π/2)`.
///
/// For `θ_RT` above roughly `0.3π` the ceiling rule selects `m = 1`, which
/// overshoots by more than one slow rotation can undo; `m - 1` full
/// iterations are used there instead. If neither is feasible (typically
/// because a cap truncated `m`), the final block falls back to `(π, π)`.
pub fn plan_rotation<T: Real>(theta_rt: T, max_blocks: Option<usize>) -> Result<RotationPlan<T>> {
    let m = compute_iterations(theta_rt, max_blocks)?;
    match slow_rotation_phases(theta_rt, m) {
        Ok(slow) => Ok(RotationPlan { full_iterations: m, slow, adjusted: false, fallback: false }),
        Err(Error::PhaseOutOfRange(_)) => {
            if m > 0 {
                if let Ok(slow) = slow_rotation_phases(theta_rt, m - 1) {
                    return Ok(RotationPlan { full_iterations: m - 1, slow, adjusted: true, fallback: false });
                }
            }
            Ok(RotationPlan { full_iterations: m, slow: (T::PI(), T::PI()), adjusted: false, fallback: true })
        }
        Err(e) => Err(e),
    }
}

/// Everything needed to run one decode, before execution.
#[derive(Clone, Debug)]
pub struct PreparedDecoder<T> {
    pub thetas: Vec<T>,
    pub valid_probability: T,
    pub theta_rt: T,
    /// `None` when frozen bit satisfaction is skipped.
    pub plan: Option<RotationPlan<T>>,
    pub circuit: Circuit<T>,
}

/// Builds the decoder circuit for the given bit probabilities.
///
/// `θ_RT` is computed from the probabilities the (possibly quantized) angles
/// actually load, so the schedule matches the simulated state.
pub fn prepare<T: Real>(code: &PolarCode, p: &ProbVector<T>, cfg: &DecoderConfig) -> Result<PreparedDecoder<T>> {
    cfg.validate()?;
    if p.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: p.len() });
    }
    let quantum = if cfg.ideal_mode { T::zero() } else { T::of(cfg.angle_quantum) };
    let thetas = compute_angles(p, quantum);
    let loaded = ProbVector::from_angles(&thetas);
    let p_valid = valid_probability(&loaded, code)?;
    let theta_rt = p_valid.sqrt().asin();

    let has_frozen = code.frozen_mask().iter().any(|&f| f);
    let satisfied = p_valid > T::one() - T::of(cfg.validity_epsilon);
    let plan = if !has_frozen || satisfied || p_valid <= T::zero() {
        None
    } else {
        let cap = (!cfg.ideal_mode).then_some(cfg.max_fbs_blocks);
        Some(plan_rotation(theta_rt, cap)?)
    };
    let phases = plan.map(|p| p.phases()).unwrap_or_default();
    let mut circuit = build_decoder_circuit(code, &thetas, &phases)?;
    if cfg.optimize_circuit {
        circuit = optimize(&circuit, code.frozen_mask());
    }
    Ok(PreparedDecoder { thetas, valid_probability: p_valid, theta_rt, plan, circuit })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult<T> {
    /// Decision basis-state index `Σ u_i 2^i`.
    pub decision: usize,
    pub u_hat: Vec<u8>,
    pub m_hat: Vec<u8>,
    pub histogram: Histogram,
    pub theta_rt: T,
    /// `sin²(θ_RT)`.
    pub valid_probability: T,
    /// Full `(π, π)` iterations before the slow rotation.
    pub m_iterations: usize,
    /// Slow-rotation phases; `None` when FBS was skipped.
    pub lambdas: Option<(T, T)>,
    pub phase_adjusted: bool,
    pub phase_fallback: bool,
    /// Valid-subspace mass of the noiseless final state.
    pub valid_mass_final: T,
    pub gate_count: usize,
}

/// Decodes one received block.
///
/// Shot `s` draws from its own stream keyed by a seed taken from `rng`, so a
/// decode consumes exactly one `u64` from the caller's generator.
pub fn decode<T: Real, R: Rng + ?Sized>(
    code: &PolarCode,
    y: &SoftVector<T>,
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeResult<T>> {
    if y.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: y.len() });
    }
    decode_probabilities(code, &ProbVector::from_soft(y), cfg, rng)
}

/// [`decode`] starting from per-bit probabilities.
pub fn decode_probabilities<T: Real, R: Rng + ?Sized>(
    code: &PolarCode,
    p: &ProbVector<T>,
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeResult<T>> {
    let prepared = prepare(code, p, cfg)?;
    let shot_seed: u64 = rng.random();
    let sampler = ShotSampler::new(&prepared.circuit, StateVector::zero(code.n())?)?;
    let final_state = sampler.final_state();

    let noise = if cfg.ideal_mode { NoiseModel::noiseless() } else { cfg.noise };
    let mut histogram = Histogram::default();
    for shot in 0..cfg.shots {
        histogram.record(sampler.sample(&noise, &mut stream(shot_seed, &[shot])));
    }

    let decision = if cfg.ideal_mode {
        argmax(&final_state.probabilities())
    } else {
        histogram.mode().expect("at least one shot")
    };
    let u_hat = index_to_bits(decision, code.n());
    let m_hat = code.extract_message(&u_hat);
    let plan = prepared.plan;
    Ok(DecodeResult {
        decision,
        u_hat,
        m_hat,
        histogram,
        theta_rt: prepared.theta_rt,
        valid_probability: prepared.valid_probability,
        m_iterations: plan.map_or(0, |p| p.full_iterations),
        lambdas: plan.map(|p| p.slow),
        phase_adjusted: plan.is_some_and(|p| p.adjusted),
        phase_fallback: plan.is_some_and(|p| p.fallback),
        valid_mass_final: final_state.subspace_probability(code.frozen_mask())?,
        gate_count: prepared.circuit.len(),
    })
}

/// Index of the largest value; ties go to the lowest index.
fn argmax<T: Real>(values: &[T]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}
