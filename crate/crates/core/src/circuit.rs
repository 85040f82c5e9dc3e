//! Five-qubit circuits that evaluate eight strategy pairs at once.
//!
//! Qubits are `(A, B, aux1, aux2, aux3)` in that order, so a five-qubit
//! outcome is `a b x y z` from most to least significant bit. The two high
//! bits are the game outcome and the three low bits select the branch.
//! `aux1` controls an X on A, `aux2` a Z on A and `aux3` a Z on B.

use alloc::vec::Vec;

use crate::game::{final_state, Strategy};
use crate::noise::PopulationVector;
use crate::statevector::{check_chi, Circuit, Gate, OutcomeDistribution, StateVector};
use crate::{Error, Result};

pub const QUBITS: usize = 5;
pub const OUTCOMES: usize = 1 << QUBITS;
pub const BRANCHES: usize = 8;

pub const QUBIT_A: usize = 0;
pub const QUBIT_B: usize = 1;
pub const AUX: [usize; 3] = [2, 3, 4];

/// Which eight strategy pairs a circuit covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// B plays I or Z.
    I,
    /// An extra X on B before disentangling, so B plays X or Y.
    X,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::I, Variant::X];
}

/// Auxiliary outcome `(x, y, z)` packed as `x << 2 | y << 1 | z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch(u8);

impl Branch {
    pub fn new(x: bool, y: bool, z: bool) -> Self {
        Self((x as u8) << 2 | (y as u8) << 1 | z as u8)
    }

    pub fn from_index(index: usize) -> Option<Self> {
        (index < BRANCHES).then_some(Self(index as u8))
    }

    pub fn all() -> impl Iterator<Item = Branch> {
        (0..BRANCHES as u8).map(Branch)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn bits(self) -> (bool, bool, bool) {
        (self.0 & 4 != 0, self.0 & 2 != 0, self.0 & 1 != 0)
    }

    /// The branch and two-qubit game outcome encoded in a five-qubit outcome.
    pub fn split_outcome(outcome: usize) -> (Branch, usize) {
        (Branch((outcome & 7) as u8), (outcome >> 3) & 3)
    }
}

/// Strategy pair `(U_A, U_B)` realised by each branch of each variant.
///
/// A applies `Z^y X^x`, which is `Y` up to a phase when both bits are set.
/// B applies `Z^z` in the I-circuit and `X Z^z` in the X-circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchMap {
    entries: [[(Strategy, Strategy); BRANCHES]; 2],
}

impl BranchMap {
    pub fn standard() -> Self {
        let mut entries = [[(Strategy::I, Strategy::I); BRANCHES]; 2];
        for variant in Variant::ALL {
            for branch in Branch::all() {
                let (x, y, z) = branch.bits();
                let a = match (x, y) {
                    (false, false) => Strategy::I,
                    (true, false) => Strategy::X,
                    (false, true) => Strategy::Z,
                    (true, true) => Strategy::Y,
                };
                let b = match (variant, z) {
                    (Variant::I, false) => Strategy::I,
                    (Variant::I, true) => Strategy::Z,
                    (Variant::X, false) => Strategy::X,
                    (Variant::X, true) => Strategy::Y,
                };
                entries[variant as usize][branch.index()] = (a, b);
            }
        }
        Self { entries }
    }

    pub fn get(&self, variant: Variant, branch: Branch) -> (Strategy, Strategy) {
        self.entries[variant as usize][branch.index()]
    }

    /// Overrides one entry; used to build deliberately wrong maps.
    pub fn with_entry(mut self, variant: Variant, branch: Branch, pair: (Strategy, Strategy)) -> Self {
        self.entries[variant as usize][branch.index()] = pair;
        self
    }

    /// Variant and branch that realise a strategy pair, if any.
    pub fn locate(&self, a: Strategy, b: Strategy) -> Option<(Variant, Branch)> {
        Variant::ALL
            .into_iter()
            .flat_map(|v| Branch::all().map(move |br| (v, br)))
            .find(|&(v, br)| self.get(v, br) == (a, b))
    }
}

impl Default for BranchMap {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelCircuit {
    variant: Variant,
    chi: f64,
    circuit: Circuit,
}

/// H on each aux, `J(χ)` on AB, CNOT(aux1→A), CZ(aux2→A), CZ(aux3→B), X on
/// B for the X variant, then `J(-χ)` on AB.
pub fn build_circuit(variant: Variant, chi: f64) -> Result<ParallelCircuit> {
    check_chi(chi)?;
    let mut gates: Vec<Gate> = AUX.iter().map(|&q| Gate::H(q)).collect();
    gates.push(Gate::Entangle { a: QUBIT_A, b: QUBIT_B, chi });
    gates.push(Gate::Cnot { control: AUX[0], target: QUBIT_A });
    gates.push(Gate::Cz { control: AUX[1], target: QUBIT_A });
    gates.push(Gate::Cz { control: AUX[2], target: QUBIT_B });
    if variant == Variant::X {
        gates.push(Gate::X(QUBIT_B));
    }
    gates.push(Gate::Disentangle { a: QUBIT_A, b: QUBIT_B, chi });
    Ok(ParallelCircuit { variant, chi, circuit: Circuit::new(QUBITS, gates)? })
}

impl ParallelCircuit {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn gates(&self) -> &[Gate] {
        self.circuit.gates()
    }

    pub fn final_state(&self) -> StateVector {
        self.circuit.run()
    }

    /// Exact outcome probabilities as a population vector with no shots behind it.
    pub fn exact_populations(&self) -> PopulationVector {
        PopulationVector::from_weights(self.final_state().probabilities().into_inner(), 0)
            .expect("probabilities are valid weights")
    }
}

/// Conditional `(A, B)` outcome distribution for each branch of one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDistributions {
    pub variant: Variant,
    pub entries: Vec<(Branch, (Strategy, Strategy), OutcomeDistribution)>,
}

impl BranchDistributions {
    pub fn get(&self, a: Strategy, b: Strategy) -> Option<&OutcomeDistribution> {
        self.entries.iter().find(|(_, pair, _)| *pair == (a, b)).map(|(_, _, d)| d)
    }
}

pub fn parse_branches(populations: &PopulationVector, variant: Variant) -> Result<BranchDistributions> {
    parse_branches_with(populations, variant, &BranchMap::standard())
}

/// Sums populations sharing an auxiliary outcome and renormalises each group.
pub fn parse_branches_with(
    populations: &PopulationVector,
    variant: Variant,
    map: &BranchMap,
) -> Result<BranchDistributions> {
    let values = populations.values();
    if values.len() != OUTCOMES {
        return Err(Error::LengthMismatch { expected: OUTCOMES, actual: values.len() });
    }
    let mut grouped = [[0.0f64; 4]; BRANCHES];
    for (outcome, &v) in values.iter().enumerate() {
        let (branch, ab) = Branch::split_outcome(outcome);
        grouped[branch.index()][ab] += v;
    }
    let mut entries = Vec::with_capacity(BRANCHES);
    for branch in Branch::all() {
        let group = grouped[branch.index()];
        let total: f64 = group.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyBranch { variant, branch: branch.0 });
        }
        let dist = OutcomeDistribution::new(group.iter().map(|v| v / total).collect())?;
        entries.push((branch, map.get(variant, branch), dist));
    }
    Ok(BranchDistributions { variant, entries })
}

/// Outcome of checking the parallel circuits against direct two-qubit games.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelizationCheck {
    pub chi: f64,
    /// Largest L∞ distance between branch-parsed and direct distributions.
    pub max_deviation: f64,
    /// Where `max_deviation` was attained.
    pub worst: Option<(Variant, Branch, (Strategy, Strategy))>,
    /// Largest distance of an auxiliary marginal from 1/8.
    pub aux_marginal_deviation: f64,
    pub passed: bool,
}

pub const PARALLELIZATION_TOLERANCE: f64 = 1e-10;
pub const AUX_MARGINAL_TOLERANCE: f64 = 1e-12;

pub fn verify_parallelization(chi_grid: &[f64], map: &BranchMap) -> Result<Vec<ParallelizationCheck>> {
    chi_grid
        .iter()
        .map(|&chi| {
            let mut check = ParallelizationCheck {
                chi,
                max_deviation: 0.0,
                worst: None,
                aux_marginal_deviation: 0.0,
                passed: false,
            };
            let mut covered = [[false; 4]; 4];
            for variant in Variant::ALL {
                let populations = build_circuit(variant, chi)?.exact_populations();
                let mut marginals = [0.0; BRANCHES];
                for (outcome, v) in populations.values().iter().enumerate() {
                    marginals[Branch::split_outcome(outcome).0.index()] += v;
                }
                for m in marginals {
                    check.aux_marginal_deviation = check.aux_marginal_deviation.max((m - 0.125).abs());
                }
                for (branch, (a, b), dist) in parse_branches_with(&populations, variant, map)?.entries {
                    covered[a.index()][b.index()] = true;
                    let direct = final_state(chi, a, b)?.probabilities();
                    let dev = dist.max_deviation(&direct);
                    if check.worst.is_none() || dev > check.max_deviation {
                        check.max_deviation = dev;
                        check.worst = Some((variant, branch, (a, b)));
                    }
                }
            }
            let exhaustive = covered.iter().flatten().all(|&c| c);
            check.passed = exhaustive
                && check.max_deviation < PARALLELIZATION_TOLERANCE
                && check.aux_marginal_deviation < AUX_MARGINAL_TOLERANCE;
            Ok(check)
        })
        .collect()
}
