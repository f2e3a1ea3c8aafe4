use std::collections::HashSet;

use super::{Circuit, Stage};
use crate::polar::butterfly_xors;
use crate::qsim::Gate;
use crate::Real;

/// Encoder XORs `(source, destination)` whose wires both still carry the
/// constant zero of frozen inputs when the XOR executes.
///
/// Running the encoder on an input with zero frozen bits, these XORs combine
/// two zeros and can be dropped. In the reverse direction the matching CNOTs
/// only reshuffle states outside the valid subspace.
pub fn removable_encoder_xors(frozen_mask: &[bool]) -> Vec<(usize, usize)> {
    let n = frozen_mask.len();
    if n < 2 || !n.is_power_of_two() {
        return Vec::new();
    }
    let mut zero = frozen_mask.to_vec();
    let mut out = Vec::new();
    for (src, dst) in butterfly_xors(n) {
        if zero[src] && zero[dst] {
            out.push((src, dst));
        } else {
            zero[dst] = false;
        }
    }
    out
}

fn self_cancelling<T: Real>(g: &Gate<T>) -> bool {
    matches!(g, Gate::X(_) | Gate::Cnot { .. })
}

/// Removes (a) adjacent identical CNOT pairs, (b) adjacent X pairs on the same
/// qubit, and (c) reverse-traversal-network CNOTs listed by
/// [`removable_encoder_xors`]. "Adjacent" means no gate in between touches
/// any operand. Passes repeat until nothing changes.
///
/// Rules (a) and (b) preserve the unitary exactly. Rule (c) is applied to every
/// CNOT of the `A`/`A^{-1}` networks consistently, which leaves the amplitudes
/// of valid states (all frozen qubits zero) unchanged.
pub fn optimize<T: Real>(circuit: &Circuit<T>, frozen_mask: &[bool]) -> Circuit<T> {
    let removable: HashSet<(usize, usize)> = if frozen_mask.len() == circuit.n_qubits() {
        removable_encoder_xors(frozen_mask).into_iter().collect()
    } else {
        HashSet::new()
    };
    let mut alive: Vec<bool> = circuit
        .iter()
        .map(|(g, stage)| match (g, stage) {
            (Gate::Cnot { control, target }, Stage::ReverseTraversal | Stage::Fbs(_)) => {
                !removable.contains(&(*control, *target))
            }
            _ => true,
        })
        .collect();

    let gates = circuit.gates();
    loop {
        let mut changed = false;
        for i in 0..gates.len() {
            if !alive[i] || !self_cancelling(&gates[i]) {
                continue;
            }
            let qs = gates[i].qubits();
            let next = (i + 1..gates.len())
                .find(|&j| alive[j] && qs.iter().any(|&q| gates[j].touches(q)));
            if let Some(j) = next {
                if gates[j] == gates[i] {
                    alive[i] = false;
                    alive[j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut out = Circuit::new(circuit.n_qubits());
    for ((g, stage), keep) in circuit.iter().zip(alive) {
        if keep {
            out.push(g.clone(), stage);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_decoder_circuit;
    use crate::polar::PolarCode;

    fn from_gates(n: usize, gates: Vec<Gate<f64>>) -> Circuit<f64> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g, Stage::Init);
        }
        c
    }

    #[test]
    fn cancels_adjacent_pairs() {
        let none = vec![false; 5];
        let c = from_gates(5, vec![Gate::Cnot { control: 0, target: 4 }; 2]);
        assert!(optimize(&c, &none).is_empty());
        let c = from_gates(5, vec![Gate::X(2), Gate::X(2)]);
        assert!(optimize(&c, &none).is_empty());
    }

    #[test]
    fn respects_intervening_gates() {
        let none = vec![false; 3];
        let c = from_gates(
            3,
            vec![Gate::X(0), Gate::Ry { qubit: 0, theta: 0.2 }, Gate::X(0)],
        );
        assert_eq!(optimize(&c, &none).len(), 3);
        // a gate on an unrelated qubit does not block cancellation
        let c = from_gates(3, vec![Gate::X(0), Gate::Z(1), Gate::X(0)]);
        assert_eq!(optimize(&c, &none).gates(), &[Gate::Z(1)]);
        // CNOTs with swapped roles are different gates
        let c = from_gates(
            3,
            vec![Gate::Cnot { control: 0, target: 1 }, Gate::Cnot { control: 1, target: 0 }],
        );
        assert_eq!(optimize(&c, &none).len(), 2);
    }

    #[test]
    fn cascades_to_fixpoint() {
        let none = vec![false; 2];
        let c = from_gates(2, vec![Gate::X(0), Gate::X(1), Gate::X(1), Gate::X(0)]);
        assert!(optimize(&c, &none).is_empty());
    }

    #[test]
    fn zero_tracking_for_the_8_4_code() {
        let mask = PolarCode::new(8, 4).unwrap().frozen_mask().to_vec();
        assert_eq!(removable_encoder_xors(&mask), vec![(1, 0)]);
        assert!(removable_encoder_xors(&[false; 8]).is_empty());
        assert_eq!(removable_encoder_xors(&[true; 4]).len(), 4);
    }

    #[test]
    fn decoder_circuit_shrinks() {
        let code = PolarCode::new(8, 4).unwrap();
        let c = build_decoder_circuit(&code, &[0.7f64; 8], &[(3.1, 3.1), (1.0, 2.0)]).unwrap();
        let o = optimize(&c, code.frozen_mask());
        assert!(o.len() < c.len());
        assert_eq!(optimize(&o, code.frozen_mask()), o);
    }
}
