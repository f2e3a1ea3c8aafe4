//! Circuit IR and the decoder's stage builders.

mod optimize;
mod text;

pub use optimize::{optimize, removable_encoder_xors};
pub use text::{export_text, parse_text};

use std::fmt;

use crate::polar::{butterfly_xors, PolarCode};
use crate::qsim::Gate;
use crate::{Error, Real, Result};

/// Which part of the decoder a gate belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Init,
    ReverseTraversal,
    /// Frozen bit satisfaction block `i` (reflections and `A`, `A^{-1}`).
    Fbs(usize),
    /// The `ZXZX` global sign closing each block.
    Negation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Init => write!(f, "init"),
            Stage::ReverseTraversal => write!(f, "reverse_traversal"),
            Stage::Fbs(i) => write!(f, "fbs_iteration({i})"),
            Stage::Negation => write!(f, "negation"),
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let indexed = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.parse().ok()
        };
        match s {
            "init" => Ok(Stage::Init),
            "reverse_traversal" => Ok(Stage::ReverseTraversal),
            "negation" => Ok(Stage::Negation),
            _ => indexed("fbs_iteration")
                .map(Stage::Fbs)
                .ok_or_else(|| format!("unknown stage tag `{s}`")),
        }
    }
}

/// Ordered gate list with a stage tag per gate.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    gates: Vec<Gate<T>>,
    stages: Vec<Stage>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new(), stages: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>, stage: Stage) {
        self.gates.push(gate);
        self.stages.push(stage);
    }

    pub fn append(&mut self, other: &Circuit<T>) {
        self.n_qubits = self.n_qubits.max(other.n_qubits);
        self.gates.extend_from_slice(&other.gates);
        self.stages.extend_from_slice(&other.stages);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Gate<T>, Stage)> {
        self.gates.iter().zip(self.stages.iter().copied())
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.n_qubits))
    }

    pub fn count_where(&self, pred: impl Fn(&Gate<T>) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }
}

/// `U_I`: `Ry(θ_i)` on qubit `i`, ascending.
pub fn build_initialization<T: Real>(thetas: &[T]) -> Circuit<T> {
    let mut c = Circuit::new(thetas.len());
    for (qubit, &theta) in thetas.iter().enumerate() {
        c.push(Gate::Ry { qubit, theta }, Stage::Init);
    }
    c
}

/// CNOT per encoder XOR, in reverse execution order. Maps `|x⟩` to `|x·G_N⟩`.
pub fn build_reverse_traversal<T: Real>(code: &PolarCode) -> Circuit<T> {
    let mut c = Circuit::new(code.n());
    for (control, target) in butterfly_xors(code.n()).into_iter().rev() {
        c.push(Gate::Cnot { control, target }, Stage::ReverseTraversal);
    }
    c
}

fn push_wrapped_phase<T: Real>(c: &mut Circuit<T>, qubits: &[usize], lambda: T, stage: Stage) {
    for &q in qubits {
        c.push(Gate::X(q), stage);
    }
    let (&target, controls) = qubits.split_last().expect("non-empty operand list");
    c.push(Gate::McPhase { controls: controls.to_vec(), target, lambda }, stage);
    for &q in qubits {
        c.push(Gate::X(q), stage);
    }
}

/// One frozen bit satisfaction block `-A S_0(λ₂) A^{-1} S_χ(λ₁)` in time order:
/// `S_χ` (phase on frozen-all-zero), `A^{-1}`, `S_0` (phase on all-zero), `A`,
/// then `ZXZX` on qubit 0.
pub fn build_fbs_block<T: Real>(
    code: &PolarCode,
    thetas: &[T],
    lambda1: T,
    lambda2: T,
    iteration: usize,
) -> Result<Circuit<T>> {
    if thetas.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: thetas.len() });
    }
    let frozen: Vec<usize> = code.frozen_positions().collect();
    if frozen.is_empty() {
        return Err(Error::NoFrozenBits);
    }
    let n = code.n();
    let stage = Stage::Fbs(iteration);
    let mut c = Circuit::new(n);

    push_wrapped_phase(&mut c, &frozen, lambda1, stage);

    for (control, target) in butterfly_xors(n) {
        c.push(Gate::Cnot { control, target }, stage);
    }
    for (qubit, &theta) in thetas.iter().enumerate() {
        c.push(Gate::Ry { qubit, theta: -theta }, stage);
    }

    let all: Vec<usize> = (0..n).collect();
    push_wrapped_phase(&mut c, &all, lambda2, stage);

    for (qubit, &theta) in thetas.iter().enumerate() {
        c.push(Gate::Ry { qubit, theta }, stage);
    }
    for (control, target) in butterfly_xors(n).into_iter().rev() {
        c.push(Gate::Cnot { control, target }, stage);
    }

    let neg = Stage::Negation;
    for g in [Gate::Z(0), Gate::X(0), Gate::Z(0), Gate::X(0)] {
        c.push(g, neg);
    }
    Ok(c)
}

/// Initialization, reverse traversal, then one FBS block per `(λ₁, λ₂)` pair.
pub fn build_decoder_circuit<T: Real>(
    code: &PolarCode,
    thetas: &[T],
    phases: &[(T, T)],
) -> Result<Circuit<T>> {
    if thetas.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), actual: thetas.len() });
    }
    let mut c = build_initialization(thetas);
    c.append(&build_reverse_traversal(code));
    for (i, &(l1, l2)) in phases.iter().enumerate() {
        c.append(&build_fbs_block(code, thetas, l1, l2, i)?);
    }
    Ok(c)
}
