//! The three-player Bayesian game: A faces type B1 with probability `p` and
//! type B2 otherwise.

use core::fmt;
use core::str::FromStr;

use crate::game::{ParseStrategyError, PayoffTensor2, Strategy};
use crate::{Error, Result};

/// Strategies of `(A, B1, B2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile {
    pub a: Strategy,
    pub b1: Strategy,
    pub b2: Strategy,
}

impl StrategyProfile {
    pub const COUNT: usize = 64;

    pub fn new(a: Strategy, b1: Strategy, b2: Strategy) -> Self {
        Self { a, b1, b2 }
    }

    /// Position in lexicographic `(A, B1, B2)` order over `I < X < Y < Z`.
    pub fn index(&self) -> usize {
        self.a.index() * 16 + self.b1.index() * 4 + self.b2.index()
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index >= Self::COUNT {
            return None;
        }
        let s = |i: usize| Strategy::from_index(i).unwrap();
        Some(Self::new(s(index / 16), s(index / 4 % 4), s(index % 4)))
    }

    pub fn all() -> impl Iterator<Item = StrategyProfile> {
        (0..Self::COUNT).filter_map(Self::from_index)
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.a, self.b1, self.b2)
    }
}

impl FromStr for StrategyProfile {
    type Err = ParseStrategyError;

    /// Accepts `IXI`, `I,X,I` or `{I,X,I}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut picks = s
            .chars()
            .filter(|c| !matches!(c, '{' | '}' | ',' | ' '))
            .map(|c| Strategy::from_char(c).ok_or(ParseStrategyError));
        let profile = Self::new(
            picks.next().ok_or(ParseStrategyError)??,
            picks.next().ok_or(ParseStrategyError)??,
            picks.next().ok_or(ParseStrategyError)??,
        );
        match picks.next() {
            None => Ok(profile),
            Some(_) => Err(ParseStrategyError),
        }
    }
}

/// `(payoff_A, payoff_B1, payoff_B2)` for all 64 strategy profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianPayoffTensor {
    chi: f64,
    p: f64,
    entries: [[f64; 3]; StrategyProfile::COUNT],
}

impl BayesianPayoffTensor {
    /// Builds a tensor from raw entries indexed by [`StrategyProfile::index`].
    pub fn from_entries(chi: f64, p: f64, entries: [[f64; 3]; StrategyProfile::COUNT]) -> Self {
        Self { chi, p, entries }
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn get(&self, profile: StrategyProfile) -> [f64; 3] {
        self.entries[profile.index()]
    }

    pub fn entries(&self) -> &[[f64; 3]; StrategyProfile::COUNT] {
        &self.entries
    }

    /// Adds `shift` to one player's payoff everywhere.
    pub fn shifted(&self, player: usize, shift: f64) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            e[player] += shift;
        }
        out
    }
}

/// Mixes the two games: A's payoff is `p·$A(A,B1) + (1-p)·$A(A,B2)` while
/// each B type keeps its own game's payoff.
///
/// The χ recorded on the result is taken from `vs_b1`.
pub fn compose(vs_b1: &PayoffTensor2, vs_b2: &PayoffTensor2, p: f64) -> Result<BayesianPayoffTensor> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let mut entries = [[0.0; 3]; StrategyProfile::COUNT];
    for profile in StrategyProfile::all() {
        let (a1, b1) = vs_b1.get(profile.a, profile.b1);
        let (a2, b2) = vs_b2.get(profile.a, profile.b2);
        entries[profile.index()] = [p * a1 + (1.0 - p) * a2, b1, b2];
    }
    Ok(BayesianPayoffTensor { chi: vs_b1.chi(), p, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{payoff_tensor, GameSpec, Opponent};
    use Strategy::*;

    fn tensors(chi: f64) -> (PayoffTensor2, PayoffTensor2) {
        let spec = GameSpec::standard(chi).unwrap();
        (payoff_tensor(&spec, Opponent::B1), payoff_tensor(&spec, Opponent::B2))
    }

    #[test]
    fn p_one_reduces_to_first_game() {
        let (t1, t2) = tensors(0.3);
        let bt = compose(&t1, &t2, 1.0).unwrap();
        for profile in StrategyProfile::all() {
            assert_eq!(bt.get(profile)[0], t1.get(profile.a, profile.b1).0);
        }
    }

    #[test]
    fn classical_example_profile() {
        let (t1, t2) = tensors(0.0);
        let bt = compose(&t1, &t2, 0.0).unwrap();
        assert_eq!(bt.get(StrategyProfile::new(I, X, I)), [11.0, 10.0, 9.0]);
    }

    #[test]
    fn half_mixing_arithmetic() {
        let mut e1 = [[(0.0, 0.0); 4]; 4];
        let mut e2 = [[(0.0, 0.0); 4]; 4];
        e1[0][0] = (6.0, 1.0);
        e2[0][0] = (11.0, 2.0);
        let bt = compose(&PayoffTensor2::from_entries(0.0, e1), &PayoffTensor2::from_entries(0.0, e2), 0.5)
            .unwrap();
        assert_eq!(bt.get(StrategyProfile::new(I, I, I)), [8.5, 1.0, 2.0]);
    }

    #[test]
    fn rejects_p_outside_unit_interval() {
        let (t1, t2) = tensors(0.0);
        assert_eq!(compose(&t1, &t2, 1.5), Err(Error::ProbabilityOutOfRange(1.5)));
        assert!(compose(&t1, &t2, -0.01).is_err());
    }

    #[test]
    fn profile_index_round_trip_and_parse() {
        for i in 0..64 {
            assert_eq!(StrategyProfile::from_index(i).unwrap().index(), i);
        }
        assert_eq!("{Z,Y,Z}".parse(), Ok(StrategyProfile::new(Z, Y, Z)));
        assert_eq!("ixi".parse(), Ok(StrategyProfile::new(I, X, I)));
        assert!("IXIZ".parse::<StrategyProfile>().is_err());
        assert!("IX".parse::<StrategyProfile>().is_err());
        assert_eq!(StrategyProfile::new(Y, X, I).to_string(), "YXI");
    }
}
