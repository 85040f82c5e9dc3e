//! Dense statevector simulation for registers of two to five qubits.
//!
//! Qubit 0 is the most significant bit of a basis index. For a two-qubit
//! register the basis is ordered `|00⟩, |01⟩, |10⟩, |11⟩` with the first
//! label belonging to qubit 0.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::{Error, Result};

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 5;

/// Largest entangling parameter of the game, maximal entanglement.
pub const CHI_MAX: f64 = FRAC_PI_4;

const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn check_chi(chi: f64) -> Result<()> {
    if (0.0..=CHI_MAX).contains(&chi) {
        Ok(())
    } else {
        Err(Error::ChiOutOfRange(chi))
    }
}

fn check_qubits(qubits: usize) -> Result<()> {
    if (MIN_QUBITS..=MAX_QUBITS).contains(&qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(qubits))
    }
}

/// Gates used by the game circuits.
///
/// `Entangle` is `J(χ) = cos χ + i X⊗X sin χ` written in matrix form with
/// `-i sin χ` on the anti-diagonal; `Disentangle` is its adjoint `J(-χ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    I(usize),
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    Cnot { control: usize, target: usize },
    Cz { control: usize, target: usize },
    Entangle { a: usize, b: usize, chi: f64 },
    Disentangle { a: usize, b: usize, chi: f64 },
}

/// A gate's action as a small dense matrix on its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    Single { target: usize, matrix: [[Complex64; 2]; 2] },
    /// Local basis ordered with `first` as the more significant bit.
    Double { first: usize, second: usize, matrix: [[Complex64; 4]; 4] },
}

pub(crate) fn pauli_matrix(index: usize) -> [[Complex64; 2]; 2] {
    match index & 3 {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        _ => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// `exp(i·angle·X⊗X)` in the sign convention of [`Gate::Entangle`].
pub(crate) fn xx_rotation(angle: f64) -> [[Complex64; 4]; 4] {
    let c = Complex64::new(libm::cos(angle), 0.0);
    let s = Complex64::new(0.0, -libm::sin(angle));
    [
        [c, ZERO, ZERO, s],
        [ZERO, c, s, ZERO],
        [ZERO, s, c, ZERO],
        [s, ZERO, ZERO, c],
    ]
}

impl Gate {
    pub fn targets(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::I(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) => ([q, q], 1),
            Gate::Cnot { control, target } | Gate::Cz { control, target } => ([control, target], 2),
            Gate::Entangle { a, b, .. } | Gate::Disentangle { a, b, .. } => ([a, b], 2),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.targets().1 == 2
    }

    /// Checks targets against a register size and the χ range for J gates.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        let (targets, arity) = self.targets();
        for &index in &targets[..arity] {
            if index >= qubits {
                return Err(Error::QubitOutOfRange { index, qubits });
            }
        }
        if arity == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTarget(targets[0]));
        }
        match *self {
            Gate::Entangle { chi, .. } | Gate::Disentangle { chi, .. } => check_chi(chi),
            _ => Ok(()),
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match *self {
            Gate::I(target) => GateMatrix::Single { target, matrix: pauli_matrix(0) },
            Gate::X(target) => GateMatrix::Single { target, matrix: pauli_matrix(1) },
            Gate::Y(target) => GateMatrix::Single { target, matrix: pauli_matrix(2) },
            Gate::Z(target) => GateMatrix::Single { target, matrix: pauli_matrix(3) },
            Gate::H(target) => GateMatrix::Single { target, matrix: [[h, h], [h, -h]] },
            Gate::Cnot { control, target } => GateMatrix::Double {
                first: control,
                second: target,
                matrix: [
                    [ONE, ZERO, ZERO, ZERO],
                    [ZERO, ONE, ZERO, ZERO],
                    [ZERO, ZERO, ZERO, ONE],
                    [ZERO, ZERO, ONE, ZERO],
                ],
            },
            Gate::Cz { control, target } => GateMatrix::Double {
                first: control,
                second: target,
                matrix: [
                    [ONE, ZERO, ZERO, ZERO],
                    [ZERO, ONE, ZERO, ZERO],
                    [ZERO, ZERO, ONE, ZERO],
                    [ZERO, ZERO, ZERO, -ONE],
                ],
            },
            Gate::Entangle { a, b, chi } => GateMatrix::Double { first: a, second: b, matrix: xx_rotation(chi) },
            Gate::Disentangle { a, b, chi } => {
                GateMatrix::Double { first: a, second: b, matrix: xx_rotation(-chi) }
            }
        }
    }
}

/// Probabilities over computational basis outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution(Vec<f64>);

impl OutcomeDistribution {
    /// Accepts non-negative finite entries summing to one within 1e-9.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        for (index, &value) in probabilities.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidEntry { index, value });
            }
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::DistributionNotNormalized(total));
        }
        Ok(Self(probabilities))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Largest absolute componentwise difference; `f64::INFINITY` on length mismatch.
    pub fn max_deviation(&self, other: &OutcomeDistribution) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    qubits: usize,
}

impl StateVector {
    /// `|0…0⟩` on `qubits` qubits.
    pub fn zero(qubits: usize) -> Result<Self> {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let dim = 1 << qubits;
        if index >= dim {
            return Err(Error::LengthMismatch { expected: dim, actual: index + 1 });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { amplitudes, qubits })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::LengthMismatch { expected: len.next_power_of_two(), actual: len });
        }
        let qubits = len.trailing_zeros() as usize;
        check_qubits(qubits)?;
        let state = Self { amplitudes, qubits };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns `U|ψ⟩` for the gate's unitary `U`.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut next = self.clone();
        next.apply_in_place(gate)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubits)?;
        self.apply_matrix(&gate.matrix());
        Ok(())
    }

    /// Born-rule probabilities `|amplitude|²` in basis order.
    pub fn probabilities(&self) -> OutcomeDistribution {
        OutcomeDistribution(self.amplitudes.iter().map(|a| a.norm_sqr()).collect())
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    /// Targets are assumed valid.
    pub(crate) fn apply_matrix(&mut self, gate: &GateMatrix) {
        match *gate {
            GateMatrix::Single { target, matrix } => self.apply_single(target, &matrix),
            GateMatrix::Double { first, second, matrix } => self.apply_double(first, second, &matrix),
        }
    }

    pub(crate) fn apply_single(&mut self, target: usize, m: &[[Complex64; 2]; 2]) {
        let stride = self.bit(target);
        for i in 0..self.amplitudes.len() {
            if i & stride != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | stride]);
            self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[i | stride] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub(crate) fn apply_double(&mut self, first: usize, second: usize, m: &[[Complex64; 4]; 4]) {
        let (hi, lo) = (self.bit(first), self.bit(second));
        for i in 0..self.amplitudes.len() {
            if i & (hi | lo) != 0 {
                continue;
            }
            let idx = [i, i | lo, i | hi, i | hi | lo];
            let old = idx.map(|k| self.amplitudes[k]);
            for (row, &k) in idx.iter().enumerate() {
                self.amplitudes[k] = m[row].iter().zip(&old).map(|(x, y)| x * y).sum();
            }
        }
    }
}

/// A gate sequence applied to `|0…0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        check_qubits(qubits)?;
        for gate in &gates {
            gate.validate(qubits)?;
        }
        Ok(Self { qubits, gates })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn run(&self) -> StateVector {
        let mut state = StateVector::zero(self.qubits).expect("qubit count validated at construction");
        for gate in &self.gates {
            state.apply_matrix(&gate.matrix());
        }
        state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm_sqr() < 1e-24
    }

    #[test]
    fn j_zero_is_identity() {
        let s = StateVector::zero(2).unwrap().apply(&Gate::Entangle { a: 0, b: 1, chi: 0.0 }).unwrap();
        assert_eq!(s, StateVector::zero(2).unwrap());
    }

    #[test]
    fn j_quarter_pi_makes_bell_state() {
        let s = StateVector::zero(2).unwrap().apply(&Gate::Entangle { a: 0, b: 1, chi: FRAC_PI_4 }).unwrap();
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let expected = [r, ZERO, ZERO, -I * r];
        for (a, b) in s.amplitudes().iter().zip(expected) {
            assert!(close(*a, b), "{a} vs {b}");
        }
        assert_eq!(s.probabilities().as_slice().len(), 4);
        let p = s.probabilities();
        assert!((p.as_slice()[0] - 0.5).abs() < 1e-12 && (p.as_slice()[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn x_on_qubit_zero_sets_most_significant_bit() {
        let s = StateVector::zero(2).unwrap().apply(&Gate::X(0)).unwrap();
        assert_eq!(s.probabilities().as_slice(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_state_probabilities() {
        assert_eq!(StateVector::zero(2).unwrap().probabilities().as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn anticommuting_strategy_flips_both_at_max_entanglement() {
        let mut s = StateVector::zero(2).unwrap();
        for g in [
            Gate::Entangle { a: 0, b: 1, chi: FRAC_PI_4 },
            Gate::Z(0),
            Gate::Disentangle { a: 0, b: 1, chi: FRAC_PI_4 },
        ] {
            s.apply_in_place(&g).unwrap();
        }
        let p = s.probabilities();
        for (got, want) in p.as_slice().iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_targets_and_chi() {
        let s = StateVector::zero(3).unwrap();
        assert_eq!(s.apply(&Gate::X(3)), Err(Error::QubitOutOfRange { index: 3, qubits: 3 }));
        assert_eq!(s.apply(&Gate::Cz { control: 1, target: 1 }), Err(Error::DuplicateTarget(1)));
        assert!(matches!(
            s.apply(&Gate::Entangle { a: 0, b: 1, chi: 1.0 }),
            Err(Error::ChiOutOfRange(_))
        ));
        assert!(matches!(
            s.apply(&Gate::Disentangle { a: 0, b: 1, chi: -0.1 }),
            Err(Error::ChiOutOfRange(_))
        ));
    }

    #[test]
    fn register_size_limits() {
        assert_eq!(StateVector::zero(1), Err(Error::QubitCount(1)));
        assert_eq!(StateVector::zero(6), Err(Error::QubitCount(6)));
        assert!(StateVector::zero(5).is_ok());
    }

    #[test]
    fn from_amplitudes_checks_norm() {
        assert!(matches!(StateVector::from_amplitudes(vec![ONE; 4]), Err(Error::NotNormalized(_))));
        assert!(StateVector::from_amplitudes(vec![ONE; 3]).is_err());
    }
}
