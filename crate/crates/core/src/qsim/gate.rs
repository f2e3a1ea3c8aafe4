use num_complex::Complex;

use crate::{Error, Real, Result};

/// Circuit gate. Angles are in radians.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    X(usize),
    Z(usize),
    P { qubit: usize, lambda: T },
    Ry { qubit: usize, theta: T },
    Cnot { control: usize, target: usize },
    /// Phase `e^{iλ}` on basis states where every control and the target are 1.
    McPhase { controls: Vec<usize>, target: usize, lambda: T },
}

impl<T: Real> Gate<T> {
    /// Operand qubits; for controlled gates the controls come first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::Z(q) => vec![*q],
            Gate::P { qubit, .. } | Gate::Ry { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::McPhase { controls, target, .. } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::McPhase { controls, .. } => controls.len() + 1,
            Gate::Cnot { .. } => 2,
            _ => 1,
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        match self {
            Gate::X(a) | Gate::Z(a) => *a == q,
            Gate::P { qubit, .. } | Gate::Ry { qubit, .. } => *qubit == q,
            Gate::Cnot { control, target } => *control == q || *target == q,
            Gate::McPhase { controls, target, .. } => *target == q || controls.contains(&q),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&index) = qs.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::QubitOutOfRange { index, n_qubits });
        }
        for (i, a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(a) {
                return Err(Error::DuplicateOperand(qs));
            }
        }
        let finite = match self {
            Gate::P { lambda: a, .. } | Gate::Ry { theta: a, .. } | Gate::McPhase { lambda: a, .. } => {
                a.is_finite()
            }
            _ => true,
        };
        if !finite {
            return Err(Error::NonFiniteAngle);
        }
        Ok(())
    }

    /// Local unitary on the operands in [`Gate::qubits`] order, operand `j`
    /// being bit `j` of the row/column index.
    pub fn matrix(&self) -> Vec<Vec<Complex<T>>> {
        let (zero, one) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        let dim = 1usize << self.arity();
        let mut m = vec![vec![zero; dim]; dim];
        match self {
            Gate::X(_) => {
                m[0][1] = one;
                m[1][0] = one;
            }
            Gate::Z(_) => {
                m[0][0] = one;
                m[1][1] = -one;
            }
            Gate::P { lambda, .. } => {
                m[0][0] = one;
                m[1][1] = Complex::from_polar(T::one(), *lambda);
            }
            Gate::Ry { theta, .. } => {
                let (s, c) = (*theta * T::of(0.5)).sin_cos();
                m[0][0] = Complex::new(c, T::zero());
                m[0][1] = Complex::new(-s, T::zero());
                m[1][0] = Complex::new(s, T::zero());
                m[1][1] = Complex::new(c, T::zero());
            }
            Gate::Cnot { .. } => {
                // bit 0 = control, bit 1 = target
                for col in 0..4 {
                    let row = if col & 1 == 1 { col ^ 2 } else { col };
                    m[row][col] = one;
                }
            }
            Gate::McPhase { lambda, .. } => {
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = one;
                }
                m[dim - 1][dim - 1] = Complex::from_polar(T::one(), *lambda);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_unitarity_defect(m: &[Vec<Complex<f64>>]) -> f64 {
        let dim = m.len();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..dim {
                    acc += m[i][k] * m[j][k].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - Complex::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn all_gate_kinds_are_unitary() {
        let gates: Vec<Gate<f64>> = vec![
            Gate::X(0),
            Gate::Z(0),
            Gate::P { qubit: 0, lambda: 0.37 },
            Gate::Ry { qubit: 0, theta: -2.1 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::McPhase { controls: vec![0, 1, 2], target: 3, lambda: 1.9 },
            Gate::McPhase { controls: vec![], target: 0, lambda: std::f64::consts::PI },
        ];
        for g in gates {
            assert!(max_unitarity_defect(&g.matrix()) <= 1e-12, "{g:?}");
        }
    }

    #[test]
    fn p_pi_is_z() {
        let p = Gate::P { qubit: 0, lambda: std::f64::consts::PI }.matrix();
        let z = Gate::<f64>::Z(0).matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[i][j] - z[i][j]).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(Gate::<f64>::Cnot { control: 1, target: 1 }.validate(3).is_err());
        assert_eq!(
            Gate::<f64>::X(3).validate(3),
            Err(Error::QubitOutOfRange { index: 3, n_qubits: 3 })
        );
        assert_eq!(Gate::Ry { qubit: 0, theta: f64::NAN }.validate(1), Err(Error::NonFiniteAngle));
        assert!(Gate::McPhase { controls: vec![0, 2], target: 1, lambda: 0.1f64 }.validate(3).is_ok());
    }
}
