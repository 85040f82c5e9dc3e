//! From raw five-qubit shots to a Bayesian payoff tensor.
//!
//! One shot dataset is taken per χ (both circuit variants) and reanalysed for
//! every `p`. Each B type's own payoff does not depend on `p`, and both types
//! play the same circuits, so B payoffs are estimated from all shots of the
//! dataset. A's payoff follows the per-shot split: shots sorted into the B1
//! pool are scored with the B1 table and the rest with the B2 table. A pool
//! that receives zero weight (`p` of 0 or 1) falls back to the full dataset,
//! where it only fills a term multiplied by zero.

use alloc::vec::Vec;

use rand::Rng;

use crate::bayesian::{compose, BayesianPayoffTensor};
use crate::circuit::{build_circuit, parse_branches, BranchMap, Variant, QUBITS};
use crate::game::{PayoffTable, PayoffTensor2, Strategy};
use crate::noise::{bayesian_split, sample_outcomes, spam_correct_with_tolerance, ConfusionMatrix, NoiseModel, PopulationVector};
use crate::statevector::OutcomeDistribution;
use crate::{Error, Result};

/// Raw shots of both parallel circuits at one nominal χ.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotDataset {
    pub chi: f64,
    pub i_circuit: Vec<u8>,
    pub x_circuit: Vec<u8>,
}

impl ShotDataset {
    pub fn sample<R: Rng + ?Sized>(
        chi: f64,
        noise: &NoiseModel,
        shots_per_circuit: usize,
        rng_i: &mut R,
        rng_x: &mut R,
    ) -> Result<Self> {
        let i = build_circuit(Variant::I, chi)?;
        let x = build_circuit(Variant::X, chi)?;
        Ok(Self {
            chi,
            i_circuit: sample_outcomes(i.circuit(), noise, shots_per_circuit, rng_i)?,
            x_circuit: sample_outcomes(x.circuit(), noise, shots_per_circuit, rng_x)?,
        })
    }

    pub fn outcomes(&self, variant: Variant) -> &[u8] {
        match variant {
            Variant::I => &self.i_circuit,
            Variant::X => &self.x_circuit,
        }
    }
}

/// Readout correction applied to every population vector before parsing.
#[derive(Debug, Clone)]
pub struct SpamCorrection {
    pub confusion: ConfusionMatrix,
    pub negative_tolerance: f64,
}

/// Conditional outcome distributions for all 16 strategy pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistributions {
    entries: Vec<Option<OutcomeDistribution>>,
}

impl PairDistributions {
    pub fn get(&self, a: Strategy, b: Strategy) -> Result<OutcomeDistribution> {
        self.entries[a.index() * 4 + b.index()]
            .clone()
            .ok_or(Error::LengthMismatch { expected: 16, actual: self.entries.iter().flatten().count() })
    }
}

/// Corrects and parses one population vector per variant.
pub fn pair_distributions(
    populations: [&PopulationVector; 2],
    correction: Option<&SpamCorrection>,
) -> Result<PairDistributions> {
    let map = BranchMap::standard();
    let mut entries: Vec<Option<OutcomeDistribution>> = (0..16).map(|_| None).collect();
    for (variant, pops) in Variant::ALL.into_iter().zip(populations) {
        let corrected;
        let pops = match correction {
            Some(c) => {
                corrected = spam_correct_with_tolerance(pops, &c.confusion, c.negative_tolerance)?;
                &corrected
            }
            None => pops,
        };
        for (branch, _, dist) in parse_branches(pops, variant)?.entries {
            let (a, b) = map.get(variant, branch);
            entries[a.index() * 4 + b.index()] = Some(dist);
        }
    }
    Ok(PairDistributions { entries })
}

fn tensor(chi: f64, table: &PayoffTable, a_from: &PairDistributions, b_from: &PairDistributions) -> Result<PayoffTensor2> {
    let a_part = PayoffTensor2::from_distributions(chi, table, |a, b| a_from.get(a, b))?;
    let b_part = PayoffTensor2::from_distributions(chi, table, |a, b| b_from.get(a, b))?;
    let mut entries = [[(0.0, 0.0); 4]; 4];
    for a in Strategy::ALL {
        for b in Strategy::ALL {
            entries[a.index()][b.index()] = (a_part.get(a, b).0, b_part.get(a, b).1);
        }
    }
    Ok(PayoffTensor2::from_entries(chi, entries))
}

/// Bayesian payoff tensor estimated from a shot dataset at mixing `p`.
pub fn shot_bayesian_tensor<R: Rng + ?Sized>(
    dataset: &ShotDataset,
    vs_b1: &PayoffTable,
    vs_b2: &PayoffTable,
    p: f64,
    correction: Option<&SpamCorrection>,
    split_rng: &mut R,
) -> Result<BayesianPayoffTensor> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let full = Variant::ALL.map(|v| PopulationVector::from_outcomes(QUBITS, dataset.outcomes(v)));
    let full_dists = pair_distributions([&full[0], &full[1]], correction)?;

    let (i_b1, i_b2) = bayesian_split(&dataset.i_circuit, QUBITS, p, split_rng)?;
    let (x_b1, x_b2) = bayesian_split(&dataset.x_circuit, QUBITS, p, split_rng)?;
    let pooled = |weight: f64, i: &PopulationVector, x: &PopulationVector| -> Result<Option<PairDistributions>> {
        if weight == 0.0 {
            Ok(None)
        } else {
            pair_distributions([i, x], correction).map(Some)
        }
    };
    let pool_b1 = pooled(p, &i_b1, &x_b1)?;
    let pool_b2 = pooled(1.0 - p, &i_b2, &x_b2)?;

    let t1 = tensor(dataset.chi, vs_b1, pool_b1.as_ref().unwrap_or(&full_dists), &full_dists)?;
    let t2 = tensor(dataset.chi, vs_b2, pool_b2.as_ref().unwrap_or(&full_dists), &full_dists)?;
    compose(&t1, &t2, p)
}
