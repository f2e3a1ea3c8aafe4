//! Line-oriented circuit text format.
//!
//! ```text
//! # qubits 8
//! # stage init
//! RY q0 1.5707963267948966e0
//! # stage reverse_traversal
//! CNOT q4 q0
//! MCP q0,q1,q2 q4 3.1415926535897931e0
//! ```
//!
//! Angles carry 17 significant digits so `f64` values round-trip exactly.
//! An MCP with no controls is written `MCP q<t> <angle>`.

use std::fmt::Write;

use super::{Circuit, Stage};
use crate::qsim::Gate;
use crate::{Error, Real, Result};

fn angle<T: Real>(a: T) -> String {
    format!("{:.16e}", a.as_f64())
}

pub fn export_text<T: Real>(circuit: &Circuit<T>) -> String {
    let mut out = String::new();
    writeln!(out, "# qubits {}", circuit.n_qubits()).unwrap();
    let mut current: Option<Stage> = None;
    for (g, stage) in circuit.iter() {
        if current != Some(stage) {
            writeln!(out, "# stage {stage}").unwrap();
            current = Some(stage);
        }
        let line = match g {
            Gate::X(q) => format!("X q{q}"),
            Gate::Z(q) => format!("Z q{q}"),
            Gate::P { qubit, lambda } => format!("P q{qubit} {}", angle(*lambda)),
            Gate::Ry { qubit, theta } => format!("RY q{qubit} {}", angle(*theta)),
            Gate::Cnot { control, target } => format!("CNOT q{control} q{target}"),
            Gate::McPhase { controls, target, lambda } if controls.is_empty() => {
                format!("MCP q{target} {}", angle(*lambda))
            }
            Gate::McPhase { controls, target, lambda } => {
                let cs: Vec<String> = controls.iter().map(|c| format!("q{c}")).collect();
                format!("MCP {} q{target} {}", cs.join(","), angle(*lambda))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse_text<T: Real>(text: &str) -> Result<Circuit<T>> {
    let mut circuit: Option<Circuit<T>> = None;
    let mut stage = Stage::Init;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| Error::Parse { line, msg };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            match words.next() {
                Some("qubits") => {
                    let n = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("bad qubit count".into()))?;
                    circuit = Some(Circuit::new(n));
                }
                Some("stage") => {
                    stage = words.next().ok_or_else(|| err("missing stage tag".into()))?.parse().map_err(err)?;
                }
                _ => {}
            }
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err("gate before `# qubits` header".into()))?;
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let qubit = |t: &str| -> Result<usize> {
            t.strip_prefix('q')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(format!("bad qubit `{t}`")))
        };
        let real = |t: &str| -> Result<T> {
            t.parse::<f64>().map(T::of).map_err(|_| err(format!("bad angle `{t}`")))
        };
        let gate = match tokens.as_slice() {
            ["X", q] => Gate::X(qubit(q)?),
            ["Z", q] => Gate::Z(qubit(q)?),
            ["P", q, a] => Gate::P { qubit: qubit(q)?, lambda: real(a)? },
            ["RY", q, a] => Gate::Ry { qubit: qubit(q)?, theta: real(a)? },
            ["CNOT", ctl, tgt] => Gate::Cnot { control: qubit(ctl)?, target: qubit(tgt)? },
            ["MCP", t, a] => Gate::McPhase { controls: Vec::new(), target: qubit(t)?, lambda: real(a)? },
            ["MCP", cs, t, a] => Gate::McPhase {
                controls: cs.split(',').map(qubit).collect::<Result<_>>()?,
                target: qubit(t)?,
                lambda: real(a)?,
            },
            _ => return Err(err(format!("unrecognized gate `{trimmed}`"))),
        };
        gate.validate(c.n_qubits()).map_err(|e| err(e.to_string()))?;
        c.push(gate, stage);
    }
    circuit.ok_or(Error::Parse { line: 0, msg: "missing `# qubits` header".into() })
}
