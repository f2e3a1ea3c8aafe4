//! Dense statevector engine with BitFlip gate noise.

mod gate;
mod noise;
mod state;

pub use gate::Gate;
pub use noise::NoiseModel;
pub use state::{Histogram, StateVector, MAX_QUBITS};

use rand::Rng;

use crate::circuit::Circuit;
use crate::{Error, Real, Result};
use state::sample_cdf;

/// First operand-slot index of each gate, plus the total slot count at the end.
fn slot_offsets<T: Real>(circuit: &Circuit<T>) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(circuit.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for g in circuit.gates() {
        acc += g.arity();
        offsets.push(acc);
    }
    offsets
}

/// Runs gates `start..` with X inserted on the flagged operand slots.
/// `flips` must be sorted and refer to slots at or after `offsets[start]`.
fn execute_from<T: Real>(
    state: &mut StateVector<T>,
    circuit: &Circuit<T>,
    offsets: &[usize],
    start: usize,
    flips: &[usize],
) {
    let mut next = flips.iter().peekable();
    for (g, gate) in circuit.gates().iter().enumerate().skip(start) {
        while let Some(&&slot) = next.peek() {
            if slot >= offsets[g + 1] {
                break;
            }
            let operand = slot - offsets[g];
            state.x(gate.qubits()[operand]);
            next.next();
        }
        state.apply_unchecked(gate);
    }
}

fn check_width<T: Real>(state: &StateVector<T>, circuit: &Circuit<T>) -> Result<()> {
    if circuit.n_qubits() > state.n_qubits() {
        return Err(Error::QubitOutOfRange {
            index: circuit.n_qubits() - 1,
            n_qubits: state.n_qubits(),
        });
    }
    circuit.validate()
}

/// Applies the circuit in order. Before each gate, each of its operand qubits
/// independently gets an X with probability `noise.p_bitflip()`.
pub fn run_circuit<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    circuit: &Circuit<T>,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    check_width(state, circuit)?;
    let offsets = slot_offsets(circuit);
    let flips = noise.sample_flips(offsets[circuit.len()], rng);
    execute_from(state, circuit, &offsets, 0, &flips);
    Ok(())
}

const CHECKPOINT_BUDGET_BYTES: usize = 64 << 20;

/// Repeated single-shot execution of one circuit under fresh noise draws.
///
/// Noiseless intermediate states are cached so a shot only re-simulates from
/// the checkpoint preceding its first flip; shots without flips sample the
/// cached final distribution directly. Draws are consumed exactly as
/// [`run_circuit`] followed by a one-shot measurement would consume them.
pub struct ShotSampler<'a, T> {
    circuit: &'a Circuit<T>,
    offsets: Vec<usize>,
    stride: usize,
    checkpoints: Vec<StateVector<T>>,
    final_state: StateVector<T>,
    final_cdf: Vec<f64>,
}

impl<'a, T: Real> ShotSampler<'a, T> {
    pub fn new(circuit: &'a Circuit<T>, initial: StateVector<T>) -> Result<Self> {
        check_width(&initial, circuit)?;
        let offsets = slot_offsets(circuit);
        let bytes_per_state = initial.dim() * 2 * std::mem::size_of::<T>();
        let stride = (circuit.len() * bytes_per_state).div_ceil(CHECKPOINT_BUDGET_BYTES).max(1);
        let mut checkpoints = Vec::with_capacity(circuit.len() / stride + 1);
        let mut state = initial;
        for (g, gate) in circuit.gates().iter().enumerate() {
            if g % stride == 0 {
                checkpoints.push(state.clone());
            }
            state.apply_unchecked(gate);
        }
        let final_cdf = state.cdf()?;
        Ok(ShotSampler { circuit, offsets, stride, checkpoints, final_state: state, final_cdf })
    }

    /// The noiseless output state.
    pub fn final_state(&self) -> &StateVector<T> {
        &self.final_state
    }

    /// One noisy execution followed by a full measurement.
    pub fn sample<R: Rng + ?Sized>(&self, noise: &NoiseModel, rng: &mut R) -> usize {
        let flips = noise.sample_flips(self.offsets[self.circuit.len()], rng);
        let Some(&first) = flips.first() else {
            return sample_cdf(&self.final_cdf, rng);
        };
        let first_gate = self.offsets.partition_point(|&o| o <= first) - 1;
        let ck = first_gate / self.stride;
        let mut state = self.checkpoints[ck].clone();
        execute_from(&mut state, self.circuit, &self.offsets, ck * self.stride, &flips);
        let cdf = state.cdf().expect("unitary evolution preserves the norm");
        sample_cdf(&cdf, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Stage;
    use crate::rng::stream;

    fn toy_circuit() -> Circuit<f64> {
        let mut c = Circuit::new(3);
        c.push(Gate::Ry { qubit: 0, theta: 0.4 }, Stage::Init);
        c.push(Gate::Ry { qubit: 1, theta: 1.1 }, Stage::Init);
        c.push(Gate::Cnot { control: 0, target: 2 }, Stage::ReverseTraversal);
        c.push(Gate::McPhase { controls: vec![0, 1], target: 2, lambda: 0.9 }, Stage::Fbs(0));
        c.push(Gate::Ry { qubit: 2, theta: -0.3 }, Stage::Fbs(0));
        c
    }

    #[test]
    fn noiseless_run_matches_sequential_application() {
        let c = toy_circuit();
        let mut a = StateVector::zero(3).unwrap();
        run_circuit(&mut a, &c, &NoiseModel::noiseless(), &mut stream(0, &[])).unwrap();
        let mut b = StateVector::zero(3).unwrap();
        for g in c.gates() {
            b.apply(g).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn certain_noise_prepends_x_on_every_operand() {
        let c = toy_circuit();
        let mut a = StateVector::zero(3).unwrap();
        run_circuit(&mut a, &c, &NoiseModel::new(1.0).unwrap(), &mut stream(0, &[])).unwrap();
        let mut b = StateVector::zero(3).unwrap();
        for g in c.gates() {
            for q in g.qubits() {
                b.apply(&Gate::X(q)).unwrap();
            }
            b.apply(g).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn noisy_run_is_seed_deterministic() {
        let c = toy_circuit();
        let noise = NoiseModel::new(0.5).unwrap();
        let run = |seed| {
            let mut s = StateVector::zero(3).unwrap();
            run_circuit(&mut s, &c, &noise, &mut stream(seed, &[])).unwrap();
            s
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }

    #[test]
    fn sampler_agrees_with_run_then_measure() {
        let c = toy_circuit();
        let noise = NoiseModel::new(0.2).unwrap();
        let sampler = ShotSampler::new(&c, StateVector::zero(3).unwrap()).unwrap();
        for shot in 0..200 {
            let fast = sampler.sample(&noise, &mut stream(9, &[shot]));
            let mut rng = stream(9, &[shot]);
            let mut s = StateVector::zero(3).unwrap();
            run_circuit(&mut s, &c, &noise, &mut rng).unwrap();
            let slow = sample_cdf(&s.cdf().unwrap(), &mut rng);
            assert_eq!(fast, slow, "shot {shot}");
        }
    }

    #[test]
    fn run_rejects_too_wide_circuit() {
        let c = toy_circuit();
        let mut s = StateVector::<f64>::zero(2).unwrap();
        assert!(run_circuit(&mut s, &c, &NoiseModel::noiseless(), &mut stream(0, &[])).is_err());
    }
}
