//! The two-player EWL game: final states for a strategy pair and expected
//! payoffs from outcome distributions.
//!
//! Player A is qubit 0 and player B is qubit 1. A measured `0` is the
//! cooperative move and `1` is defection, so the outcome index `a << 1 | b`
//! addresses `PayoffTable` row `a`, column `b`.

use core::fmt;
use core::str::FromStr;

use crate::statevector::{check_chi, Gate, OutcomeDistribution, StateVector};
use crate::{Error, Result};

/// One of the four pure quantum strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    I,
    X,
    Y,
    Z,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::I, Strategy::X, Strategy::Y, Strategy::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_char(self) -> char {
        match self {
            Strategy::I => 'I',
            Strategy::X => 'X',
            Strategy::Y => 'Y',
            Strategy::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Strategy::I),
            'X' => Some(Strategy::X),
            'Y' => Some(Strategy::Y),
            'Z' => Some(Strategy::Z),
            _ => None,
        }
    }

    pub fn gate(self, qubit: usize) -> Gate {
        match self {
            Strategy::I => Gate::I(qubit),
            Strategy::X => Gate::X(qubit),
            Strategy::Y => Gate::Y(qubit),
            Strategy::Z => Gate::Z(qubit),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseStrategyError;

impl fmt::Display for ParseStrategyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of I, X, Y, Z")
    }
}

impl FromStr for Strategy {
    type Err = ParseStrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Strategy::from_char(c).ok_or(ParseStrategyError),
            _ => Err(ParseStrategyError),
        }
    }
}

/// The two types player B may be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opponent {
    B1,
    B2,
}

/// Classical 2×2 payoffs: `rows[a][b] = [payoff_a, payoff_b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffTable {
    rows: [[[f64; 2]; 2]; 2],
}

impl PayoffTable {
    pub fn new(rows: [[[f64; 2]; 2]; 2]) -> Result<Self> {
        if rows.iter().flatten().flatten().all(|v| v.is_finite()) {
            Ok(Self { rows })
        } else {
            Err(Error::NonFinitePayoff)
        }
    }

    /// The standard prisoner's dilemma played against type B1.
    pub fn prisoners_dilemma() -> Self {
        Self { rows: [[[11.0, 9.0], [1.0, 10.0]], [[10.0, 1.0], [6.0, 6.0]]] }
    }

    /// The asymmetric game against type B2, who gains less from defecting.
    pub fn asymmetric_dilemma() -> Self {
        Self { rows: [[[11.0, 9.0], [1.0, 6.0]], [[10.0, 1.0], [6.0, 0.0]]] }
    }

    pub fn rows(&self) -> &[[[f64; 2]; 2]; 2] {
        &self.rows
    }

    /// Payoffs `(A, B)` for the classical outcome `(a, b)`.
    pub fn entry(&self, a: usize, b: usize) -> (f64, f64) {
        let [pa, pb] = self.rows[a][b];
        (pa, pb)
    }

    /// Payoffs for two-qubit outcome index `a << 1 | b`.
    pub fn outcome(&self, outcome: usize) -> (f64, f64) {
        self.entry(outcome >> 1, outcome & 1)
    }

    /// The same game with the players' roles exchanged.
    pub fn transposed(&self) -> Self {
        let mut rows = [[[0.0; 2]; 2]; 2];
        for (a, row) in rows.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let [pa, pb] = self.rows[b][a];
                *cell = [pb, pa];
            }
        }
        Self { rows }
    }

    /// `(min, max)` over the table for player `0` (A) or `1` (B).
    pub fn bounds(&self, player: usize) -> (f64, f64) {
        self.rows
            .iter()
            .flatten()
            .map(|cell| cell[player])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSpec {
    chi: f64,
    vs_b1: PayoffTable,
    vs_b2: PayoffTable,
}

impl GameSpec {
    pub fn new(chi: f64, vs_b1: PayoffTable, vs_b2: PayoffTable) -> Result<Self> {
        check_chi(chi)?;
        Ok(Self { chi, vs_b1, vs_b2 })
    }

    /// The two default tables at entanglement `chi`.
    pub fn standard(chi: f64) -> Result<Self> {
        Self::new(chi, PayoffTable::prisoners_dilemma(), PayoffTable::asymmetric_dilemma())
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn table(&self, opponent: Opponent) -> &PayoffTable {
        match opponent {
            Opponent::B1 => &self.vs_b1,
            Opponent::B2 => &self.vs_b2,
        }
    }
}

/// Expected `(A, B)` payoffs for every pair of strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffTensor2 {
    chi: f64,
    entries: [[(f64, f64); 4]; 4],
}

impl PayoffTensor2 {
    pub fn from_entries(chi: f64, entries: [[(f64, f64); 4]; 4]) -> Self {
        Self { chi, entries }
    }

    /// Evaluates `table` against a distribution for every `(A, B)` strategy pair.
    pub fn from_distributions(
        chi: f64,
        table: &PayoffTable,
        mut distribution: impl FnMut(Strategy, Strategy) -> Result<OutcomeDistribution>,
    ) -> Result<Self> {
        let mut entries = [[(0.0, 0.0); 4]; 4];
        for a in Strategy::ALL {
            for b in Strategy::ALL {
                entries[a.index()][b.index()] = expected_payoff(&distribution(a, b)?, table)?;
            }
        }
        Ok(Self { chi, entries })
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn get(&self, a: Strategy, b: Strategy) -> (f64, f64) {
        self.entries[a.index()][b.index()]
    }

    pub fn entries(&self) -> &[[(f64, f64); 4]; 4] {
        &self.entries
    }
}

/// `J†(χ) (U_A ⊗ U_B) J(χ) |00⟩`.
pub fn final_state(chi: f64, u_a: Strategy, u_b: Strategy) -> Result<StateVector> {
    check_chi(chi)?;
    let mut state = StateVector::zero(2)?;
    for gate in [
        Gate::Entangle { a: 0, b: 1, chi },
        u_a.gate(0),
        u_b.gate(1),
        Gate::Disentangle { a: 0, b: 1, chi },
    ] {
        state.apply_in_place(&gate)?;
    }
    Ok(state)
}

/// Probability-weighted average of the table over the four outcomes.
pub fn expected_payoff(dist: &OutcomeDistribution, table: &PayoffTable) -> Result<(f64, f64)> {
    if dist.len() != 4 {
        return Err(Error::LengthMismatch { expected: 4, actual: dist.len() });
    }
    let total: f64 = dist.as_slice().iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::DistributionNotNormalized(total));
    }
    Ok(dist.as_slice().iter().enumerate().fold((0.0, 0.0), |(sa, sb), (outcome, &prob)| {
        let (pa, pb) = table.outcome(outcome);
        (sa + prob * pa, sb + prob * pb)
    }))
}

/// Exact expected payoffs for all 16 strategy pairs against one B type.
pub fn payoff_tensor(spec: &GameSpec, which: Opponent) -> PayoffTensor2 {
    PayoffTensor2::from_distributions(spec.chi, spec.table(which), |a, b| {
        final_state(spec.chi, a, b).map(|s| s.probabilities())
    })
    .expect("game spec invariants guarantee valid states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_4, PI};

    fn dist(p: [f64; 4]) -> OutcomeDistribution {
        OutcomeDistribution::new(p.to_vec()).unwrap()
    }

    fn assert_probs(state: &StateVector, want: [f64; 4]) {
        for (got, want) in state.probabilities().as_slice().iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn classical_identity_game() {
        assert_probs(&final_state(0.0, Strategy::I, Strategy::I).unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn max_entanglement_examples() {
        assert_probs(&final_state(FRAC_PI_4, Strategy::X, Strategy::X).unwrap(), [0.0, 0.0, 0.0, 1.0]);
        assert_probs(&final_state(FRAC_PI_4, Strategy::Z, Strategy::I).unwrap(), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn final_state_rejects_out_of_range_chi() {
        assert!(matches!(final_state(PI, Strategy::I, Strategy::I), Err(Error::ChiOutOfRange(_))));
    }

    #[test]
    fn expected_payoff_examples() {
        let b1 = PayoffTable::prisoners_dilemma();
        let b2 = PayoffTable::asymmetric_dilemma();
        assert_eq!(expected_payoff(&dist([0.0, 1.0, 0.0, 0.0]), &b1).unwrap(), (1.0, 10.0));
        assert_eq!(expected_payoff(&dist([0.25; 4]), &b1).unwrap(), (7.0, 6.5));
        assert_eq!(expected_payoff(&dist([0.0, 0.0, 0.0, 1.0]), &b2).unwrap(), (6.0, 0.0));
    }

    #[test]
    fn expected_payoff_requires_four_outcomes() {
        let d = OutcomeDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(
            expected_payoff(&d, &PayoffTable::prisoners_dilemma()),
            Err(Error::LengthMismatch { expected: 4, actual: 2 })
        );
    }

    #[test]
    fn tensor_examples() {
        let t = payoff_tensor(&GameSpec::standard(0.0).unwrap(), Opponent::B1);
        assert_eq!(t.get(Strategy::I, Strategy::I), (11.0, 9.0));
        for a in [Strategy::I, Strategy::Z] {
            for b in [Strategy::I, Strategy::Z] {
                assert_eq!(t.get(a, b), (11.0, 9.0));
            }
        }
        let t = payoff_tensor(&GameSpec::standard(FRAC_PI_4).unwrap(), Opponent::B1);
        let (a, b) = t.get(Strategy::Z, Strategy::I);
        assert!((a - 6.0).abs() < 1e-12 && (b - 6.0).abs() < 1e-12);
    }

    #[test]
    fn table_json_layout_and_transpose() {
        let t = PayoffTable::prisoners_dilemma();
        assert_eq!(t.entry(0, 1), (1.0, 10.0));
        assert_eq!(t.transposed().entry(1, 0), (10.0, 1.0));
        assert_eq!(t.transposed().transposed(), t);
        assert_eq!(t.bounds(0), (1.0, 11.0));
        assert!(PayoffTable::new([[[f64::NAN, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]).is_err());
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("y".parse::<Strategy>(), Ok(Strategy::Y));
        assert!("XY".parse::<Strategy>().is_err());
        assert_eq!(Strategy::from_index(3), Some(Strategy::Z));
        assert_eq!(Strategy::from_index(4), None);
    }
}
