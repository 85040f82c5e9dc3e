//! δ-tolerant best responses, pure Nash equilibria of the Bayesian game,
//! transitions of the equilibrium set along `p`, and payoff RMSD.

use alloc::vec::Vec;

use crate::bayesian::{BayesianPayoffTensor, StrategyProfile};
use crate::game::Strategy;
use crate::{Error, Result};

/// Slack added to every δ so analytically equal payoffs tie under rounding.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Default δ for exact tensors.
pub const ANALYTIC_DELTA: f64 = 0.0;

/// Default δ for tensors estimated from shots.
pub const SHOT_DELTA: f64 = 0.1;

pub const DEFAULT_TRANSITION_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    A,
    B1,
    B2,
}

impl Player {
    pub const ALL: [Player; 3] = [Player::A, Player::B1, Player::B2];

    fn slot(self) -> usize {
        self as usize
    }

    /// The player's own choice and the index of the others' choices.
    fn split(self, profile: StrategyProfile) -> (Strategy, usize) {
        let StrategyProfile { a, b1, b2 } = profile;
        match self {
            Player::A => (a, b1.index() * 4 + b2.index()),
            Player::B1 => (b1, a.index() * 4 + b2.index()),
            Player::B2 => (b2, a.index() * 4 + b1.index()),
        }
    }

    fn join(self, own: Strategy, context: usize) -> StrategyProfile {
        let (x, y) = (Strategy::ALL[context / 4], Strategy::ALL[context % 4]);
        match self {
            Player::A => StrategyProfile::new(own, x, y),
            Player::B1 => StrategyProfile::new(x, own, y),
            Player::B2 => StrategyProfile::new(x, y, own),
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// For each of the 16 choices of the other two players, the set of own
/// strategies whose payoff is within δ of the best.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseSet {
    player: Player,
    delta: f64,
    masks: [u8; 16],
}

impl BestResponseSet {
    pub fn player(&self) -> Player {
        self.player
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn contains(&self, profile: StrategyProfile) -> bool {
        let (own, context) = self.player.split(profile);
        self.masks[context] & (1 << own.index()) != 0
    }

    /// Best responses in one context. For A the context is `(B1, B2)`, for B1
    /// it is `(A, B2)` and for B2 it is `(A, B1)`.
    pub fn responses(&self, others: (Strategy, Strategy)) -> impl Iterator<Item = Strategy> + '_ {
        let mask = self.masks[others.0.index() * 4 + others.1.index()];
        Strategy::ALL.into_iter().filter(move |s| mask & (1 << s.index()) != 0)
    }
}

pub fn best_responses(tensor: &BayesianPayoffTensor, player: Player, delta: f64) -> Result<BestResponseSet> {
    check_delta(delta)?;
    let mut masks = [0u8; 16];
    for (context, mask) in masks.iter_mut().enumerate() {
        let payoffs = Strategy::ALL.map(|own| tensor.get(player.join(own, context))[player.slot()]);
        let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (i, &v) in payoffs.iter().enumerate() {
            if v >= best - delta - TIE_TOLERANCE {
                *mask |= 1 << i;
            }
        }
    }
    Ok(BestResponseSet { player, delta, masks })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    pub payoffs: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub chi: f64,
    pub p: f64,
    pub delta: f64,
    /// Ordered by profile index.
    pub equilibria: Vec<Equilibrium>,
}

impl EquilibriumReport {
    pub fn contains(&self, profile: StrategyProfile) -> bool {
        self.equilibria.iter().any(|e| e.profile == profile)
    }

    pub fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        self.equilibria.iter().map(|e| e.profile)
    }

    /// Highest payoff for A; ties go to the lowest profile index.
    pub fn max_payoff(&self) -> Option<&Equilibrium> {
        self.equilibria.iter().fold(None, |best: Option<&Equilibrium>, e| match best {
            Some(b) if e.payoffs[0] <= b.payoffs[0] + TIE_TOLERANCE => Some(b),
            _ => Some(e),
        })
    }
}

/// Every profile that lies in all three best-response sets.
pub fn nash_equilibria(tensor: &BayesianPayoffTensor, delta: f64) -> Result<EquilibriumReport> {
    let sets = Player::ALL.map(|player| best_responses(tensor, player, delta));
    let [a, b1, b2] = sets;
    let (a, b1, b2) = (a?, b1?, b2?);
    let equilibria = StrategyProfile::all()
        .filter(|&profile| a.contains(profile) && b1.contains(profile) && b2.contains(profile))
        .map(|profile| Equilibrium { profile, payoffs: tensor.get(profile) })
        .collect();
    Ok(EquilibriumReport { chi: tensor.chi(), p: tensor.p(), delta, equilibria })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Enters,
    Leaves,
}

/// A grid point bounding a run of equilibrium membership: for `Leaves` the
/// last `p` at which the profile was still an equilibrium, for `Enters` the
/// first `p` at which it is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub p: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport {
    pub profile: StrategyProfile,
    pub thresholds: Vec<Threshold>,
    pub window: usize,
}

/// Finds where `profile` enters or leaves the equilibrium set along `p`.
///
/// A change only counts once the new membership holds for `window`
/// consecutive grid points (or until the end of the grid), so a blurred
/// transition is reported once, at the edge of its stable run.
pub fn detect_transitions(
    reports: &[EquilibriumReport],
    profile: StrategyProfile,
    window: usize,
) -> Result<TransitionReport> {
    if reports.is_empty() {
        return Err(Error::EmptyReports);
    }
    if reports.windows(2).any(|w| w[1].p <= w[0].p) {
        return Err(Error::UnorderedReports);
    }
    let window = window.max(1);
    let member: Vec<bool> = reports.iter().map(|r| r.contains(profile)).collect();
    let mut state = member[0];
    let mut thresholds = Vec::new();
    for i in 1..member.len() {
        if member[i] == state {
            continue;
        }
        let end = (i + window).min(member.len());
        if member[i..end].iter().all(|&m| m != state) {
            thresholds.push(if state {
                Threshold { p: reports[i - 1].p, direction: Direction::Leaves }
            } else {
                Threshold { p: reports[i].p, direction: Direction::Enters }
            });
            state = !state;
        }
    }
    Ok(TransitionReport { profile, thresholds, window })
}

/// Root-mean-square payoff deviation over the three players at the
/// reference's maximal-payoff equilibrium.
pub fn rmsd_at_equilibrium(
    observed: &BayesianPayoffTensor,
    reference: &BayesianPayoffTensor,
    delta: f64,
) -> Result<f64> {
    let report = nash_equilibria(reference, delta)?;
    let target = report.max_payoff().ok_or(Error::NoReferenceEquilibrium)?;
    Ok(rmsd_at(observed, reference, target.profile))
}

pub fn rmsd_at(observed: &BayesianPayoffTensor, reference: &BayesianPayoffTensor, profile: StrategyProfile) -> f64 {
    let (o, r) = (observed.get(profile), reference.get(profile));
    let mean_sq = o.iter().zip(&r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 3.0;
    libm::sqrt(mean_sq)
}
