//! Finite-shot emulation of the noisy experiment and readout correction.
//!
//! Gate noise is sampled per shot as Pauli trajectories: after each gate, with
//! the gate's depolarizing probability, a Pauli drawn uniformly from the
//! `4^k` Paulis on its `k`-qubit support (identity included) is applied.
//! Readout then flips each bit independently and optionally mixes
//! neighbouring channels.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::statevector::{pauli_matrix, xx_rotation, Circuit, Gate, GateMatrix, StateVector};
use crate::{Error, Result};

/// Corrected populations more negative than this fraction of the total are
/// treated as a model mismatch instead of being clipped.
pub const DEFAULT_NEGATIVE_TOLERANCE: f64 = 1e-3;

const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub single_qubit_depol: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub two_qubit_depol: f64,
    pub readout_flip_0to1: f64,
    pub readout_flip_1to0: f64,
    /// Probability that adjacent readout channels exchange their bits.
    pub readout_crosstalk: f64,
    /// Systematic χ miscalibration, radians.
    pub chi_offset: f64,
    /// Shot-to-shot χ spread at χ = 0, radians.
    pub chi_jitter_sigma: f64,
    /// Growth of the χ spread per radian of nominal χ.
    pub chi_jitter_slope: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            single_qubit_depol: 0.0,
            two_qubit_depol: 0.0,
            readout_flip_0to1: 0.0,
            readout_flip_1to0: 0.0,
            readout_crosstalk: 0.0,
            chi_offset: 0.0,
            chi_jitter_sigma: 0.0,
            chi_jitter_slope: 0.0,
            seed: 0,
        }
    }

    /// Gate and readout errors at the level of a small trapped-ion register:
    /// 99.5% / 98.5% gate fidelities, 0.6% symmetric readout error and a χ
    /// spread growing from 0.002π at χ = 0 to 0.006π at χ = π/4.
    pub fn paper_like() -> Self {
        use core::f64::consts::PI;
        Self {
            single_qubit_depol: 0.005,
            two_qubit_depol: 0.015,
            readout_flip_0to1: 0.006,
            readout_flip_1to0: 0.006,
            chi_jitter_sigma: 0.002 * PI,
            chi_jitter_slope: 0.016,
            ..Self::noiseless()
        }
    }

    pub fn readout_only(flip: f64) -> Self {
        Self { readout_flip_0to1: flip, readout_flip_1to0: flip, ..Self::noiseless() }
    }

    pub fn validate(&self) -> Result<()> {
        let probabilities = [
            ("single_qubit_depol", self.single_qubit_depol),
            ("two_qubit_depol", self.two_qubit_depol),
            ("readout_flip_0to1", self.readout_flip_0to1),
            ("readout_flip_1to0", self.readout_flip_1to0),
            ("readout_crosstalk", self.readout_crosstalk),
        ];
        for (name, value) in probabilities {
            if !(0.0..=0.5).contains(&value) {
                return Err(Error::InvalidNoise { name, value });
            }
        }
        for (name, value) in [("chi_jitter_sigma", self.chi_jitter_sigma), ("chi_jitter_slope", self.chi_jitter_slope)]
        {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidNoise { name, value });
            }
        }
        if !self.chi_offset.is_finite() {
            return Err(Error::InvalidNoise { name: "chi_offset", value: self.chi_offset });
        }
        Ok(())
    }

    /// Standard deviation of the per-shot χ at nominal `chi`.
    pub fn chi_jitter_at(&self, chi: f64) -> f64 {
        self.chi_jitter_sigma + self.chi_jitter_slope * chi.abs()
    }

    fn has_gate_noise(&self) -> bool {
        self.single_qubit_depol > 0.0 || self.two_qubit_depol > 0.0
    }

    fn has_readout_noise(&self) -> bool {
        self.readout_flip_0to1 > 0.0 || self.readout_flip_1to0 > 0.0 || self.readout_crosstalk > 0.0
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::paper_like()
    }
}

/// Counts (or weights) over the `2^n` outcomes of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    values: Vec<f64>,
    shot_count: u64,
}

impl PopulationVector {
    pub fn from_outcomes(qubits: usize, outcomes: &[u8]) -> Self {
        let mut values = vec![0.0; 1 << qubits];
        for &o in outcomes {
            values[o as usize] += 1.0;
        }
        Self { values, shot_count: outcomes.len() as u64 }
    }

    pub fn from_counts(counts: &[u64]) -> Self {
        Self { values: counts.iter().map(|&c| c as f64).collect(), shot_count: counts.iter().sum() }
    }

    /// Non-negative weights, e.g. exact probabilities (`shot_count` 0) or
    /// corrected quasi-counts.
    pub fn from_weights(values: Vec<f64>, shot_count: u64) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidEntry { index, value });
        }
        Ok(Self { values, shot_count })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shot_count(&self) -> u64 {
        self.shot_count
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total();
        self.values.iter().map(|v| v / total).collect()
    }
}

/// Column-stochastic readout map: `matrix[(observed, prepared)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    qubits: usize,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl ConfusionMatrix {
    /// `rows` is row-major, `rows[observed * dim + prepared]`.
    pub fn from_row_major(qubits: usize, rows: &[f64]) -> Result<Self> {
        let dim = 1 << qubits;
        if rows.len() != dim * dim {
            return Err(Error::LengthMismatch { expected: dim * dim, actual: rows.len() });
        }
        if let Some((index, &value)) = rows.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidEntry { index, value });
        }
        let matrix = DMatrix::from_row_slice(dim, dim, rows);
        for (column, col) in matrix.column_iter().enumerate() {
            let sum = col.sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NotStochastic { column, sum });
            }
        }
        let inverse = matrix.clone().lu().try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
        let condition = norm1(&matrix) * norm1(&inverse);
        if condition.is_nan() || condition >= CONDITION_LIMIT {
            return Err(Error::Singular(condition));
        }
        Ok(Self { qubits, matrix, inverse })
    }

    pub fn identity(qubits: usize) -> Self {
        let dim = 1 << qubits;
        Self { qubits, matrix: DMatrix::identity(dim, dim), inverse: DMatrix::identity(dim, dim) }
    }

    /// The readout map implied by a noise model's flip and crosstalk terms.
    pub fn from_noise(noise: &NoiseModel, qubits: usize) -> Result<Self> {
        noise.validate()?;
        let dim = 1 << qubits;
        let mut rows = vec![0.0; dim * dim];
        for prepared in 0..dim {
            let mut column = vec![0.0; dim];
            column[prepared] = 1.0;
            for q in 0..qubits {
                column = flip_step(&column, qubits, q, noise);
            }
            for q in 0..qubits.saturating_sub(1) {
                column = crosstalk_step(&column, qubits, q, noise.readout_crosstalk);
            }
            for (observed, v) in column.into_iter().enumerate() {
                rows[observed * dim + prepared] = v;
            }
        }
        Self::from_row_major(qubits, &rows)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn get(&self, observed: usize, prepared: usize) -> f64 {
        self.matrix[(observed, prepared)]
    }

    /// Forward map: observed populations for the given true populations.
    pub fn apply(&self, populations: &PopulationVector) -> PopulationVector {
        let v = &self.matrix * DVector::from_column_slice(populations.values());
        PopulationVector { values: v.iter().map(|x| x.max(0.0)).collect(), shot_count: populations.shot_count }
    }

    fn invert(&self, values: &[f64]) -> Vec<f64> {
        (&self.inverse * DVector::from_column_slice(values)).iter().copied().collect()
    }
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn bit(qubits: usize, q: usize) -> usize {
    1 << (qubits - 1 - q)
}

fn flip_step(dist: &[f64], qubits: usize, q: usize, noise: &NoiseModel) -> Vec<f64> {
    let mask = bit(qubits, q);
    let mut out = vec![0.0; dist.len()];
    for (i, &v) in dist.iter().enumerate() {
        let flip = if i & mask == 0 { noise.readout_flip_0to1 } else { noise.readout_flip_1to0 };
        out[i] += (1.0 - flip) * v;
        out[i ^ mask] += flip * v;
    }
    out
}

fn swap_bits(i: usize, a: usize, b: usize) -> usize {
    if (i & a == 0) != (i & b == 0) {
        i ^ (a | b)
    } else {
        i
    }
}

fn crosstalk_step(dist: &[f64], qubits: usize, q: usize, c: f64) -> Vec<f64> {
    let (a, b) = (bit(qubits, q), bit(qubits, q + 1));
    let mut out = vec![0.0; dist.len()];
    for (i, &v) in dist.iter().enumerate() {
        out[i] += (1.0 - c) * v;
        out[swap_bits(i, a, b)] += c * v;
    }
    out
}

/// Applies the inverse confusion map, clipping small negative entries.
pub fn spam_correct(populations: &PopulationVector, confusion: &ConfusionMatrix) -> Result<PopulationVector> {
    spam_correct_with_tolerance(populations, confusion, DEFAULT_NEGATIVE_TOLERANCE)
}

/// As [`spam_correct`]; entries below `-tolerance · total` are an error. The
/// result keeps the input's total.
pub fn spam_correct_with_tolerance(
    populations: &PopulationVector,
    confusion: &ConfusionMatrix,
    tolerance: f64,
) -> Result<PopulationVector> {
    let dim = 1 << confusion.qubits;
    if populations.values.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, actual: populations.values.len() });
    }
    let total = populations.total();
    let mut corrected = confusion.invert(&populations.values);
    let mut clipped = false;
    for (outcome, v) in corrected.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < -tolerance * total {
                return Err(Error::NegativePopulation { outcome, value: *v });
            }
            *v = 0.0;
            clipped = true;
        }
    }
    if clipped {
        let sum: f64 = corrected.iter().sum();
        if sum > 0.0 {
            corrected.iter_mut().for_each(|v| *v *= total / sum);
        }
    }
    Ok(PopulationVector { values: corrected, shot_count: populations.shot_count })
}

/// Sorts each shot into the B1 pool with probability `p`, else the B2 pool.
pub fn bayesian_split<R: Rng + ?Sized>(
    outcomes: &[u8],
    qubits: usize,
    p: f64,
    rng: &mut R,
) -> Result<(PopulationVector, PopulationVector)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let mut pools = [vec![0.0; 1 << qubits], vec![0.0; 1 << qubits]];
    let mut sizes = [0u64; 2];
    for &o in outcomes {
        let pool = if rng.random::<f64>() < p { 0 } else { 1 };
        pools[pool][o as usize] += 1.0;
        sizes[pool] += 1;
    }
    let [b1, b2] = pools;
    Ok((
        PopulationVector { values: b1, shot_count: sizes[0] },
        PopulationVector { values: b2, shot_count: sizes[1] },
    ))
}

/// Draws `shots` noisy measurement records of `circuit`, one `u8` per shot
/// holding the full register outcome.
///
/// Every entangling gate of a shot uses the same actual χ, drawn as nominal
/// plus offset plus Gaussian jitter.
pub fn sample_outcomes<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: &NoiseModel,
    shots: usize,
    rng: &mut R,
) -> Result<Vec<u8>> {
    noise.validate()?;
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let qubits = circuit.qubits();
    let nominal = circuit.gates().iter().find_map(|g| match *g {
        Gate::Entangle { chi, .. } | Gate::Disentangle { chi, .. } => Some(chi),
        _ => None,
    });
    let sigma = nominal.map_or(0.0, |chi| noise.chi_jitter_at(chi));
    let fixed = (sigma == 0.0).then(|| cumulative(&run_trajectory(circuit, noise.chi_offset, &[])));

    let mut faults: Vec<(usize, usize)> = Vec::new();
    let mut outcomes = Vec::with_capacity(shots);
    for _ in 0..shots {
        let shift = if sigma > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            noise.chi_offset + sigma * z
        } else {
            noise.chi_offset
        };
        faults.clear();
        if noise.has_gate_noise() {
            for (position, gate) in circuit.gates().iter().enumerate() {
                let (q, paulis) =
                    if gate.is_two_qubit() { (noise.two_qubit_depol, 16) } else { (noise.single_qubit_depol, 4) };
                if q > 0.0 && rng.random::<f64>() < q {
                    faults.push((position, rng.random_range(0..paulis)));
                }
            }
        }
        let outcome = match (&fixed, faults.is_empty()) {
            (Some(cdf), true) => draw(cdf, rng),
            _ => draw(&cumulative(&run_trajectory(circuit, shift, &faults)), rng),
        };
        outcomes.push(apply_readout(outcome, qubits, noise, rng) as u8);
    }
    Ok(outcomes)
}

/// [`sample_outcomes`] tallied into a population vector.
pub fn sample_shots<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: &NoiseModel,
    shots: usize,
    rng: &mut R,
) -> Result<PopulationVector> {
    let outcomes = sample_outcomes(circuit, noise, shots, rng)?;
    Ok(PopulationVector::from_outcomes(circuit.qubits(), &outcomes))
}

/// Runs the circuit with every J angle shifted by `shift` and the Pauli
/// `faults[k].1` (base-4 digits per qubit of the support) after gate `faults[k].0`.
fn run_trajectory(circuit: &Circuit, shift: f64, faults: &[(usize, usize)]) -> Vec<f64> {
    let mut state = StateVector::zero(circuit.qubits()).expect("circuit register is valid");
    let mut pending = faults.iter().peekable();
    for (position, gate) in circuit.gates().iter().enumerate() {
        let m = match *gate {
            Gate::Entangle { a, b, chi } => GateMatrix::Double { first: a, second: b, matrix: xx_rotation(chi + shift) },
            Gate::Disentangle { a, b, chi } => {
                GateMatrix::Double { first: a, second: b, matrix: xx_rotation(-(chi + shift)) }
            }
            _ => gate.matrix(),
        };
        state.apply_matrix(&m);
        while let Some(&&(at, pauli)) = pending.peek() {
            if at != position {
                break;
            }
            let (targets, arity) = gate.targets();
            for (k, &q) in targets[..arity].iter().enumerate() {
                let which = (pauli >> (2 * k)) & 3;
                if which != 0 {
                    state.apply_single(q, &pauli_matrix(which));
                }
            }
            pending.next();
        }
    }
    state.probabilities().into_inner()
}

fn cumulative(probabilities: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let r = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.iter().position(|&c| r < c).unwrap_or(cdf.len() - 1)
}

fn apply_readout<R: Rng + ?Sized>(mut outcome: usize, qubits: usize, noise: &NoiseModel, rng: &mut R) -> usize {
    if !noise.has_readout_noise() {
        return outcome;
    }
    for q in 0..qubits {
        let mask = bit(qubits, q);
        let flip = if outcome & mask == 0 { noise.readout_flip_0to1 } else { noise.readout_flip_1to0 };
        if flip > 0.0 && rng.random::<f64>() < flip {
            outcome ^= mask;
        }
    }
    if noise.readout_crosstalk > 0.0 {
        for q in 0..qubits - 1 {
            if rng.random::<f64>() < noise.readout_crosstalk {
                outcome = swap_bits(outcome, bit(qubits, q), bit(qubits, q + 1));
            }
        }
    }
    outcome
}

/// χ inferred from the `|11⟩` frequency of `J(χ)|00⟩`, which is `sin²χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiEstimate {
    pub chi: f64,
    pub uncertainty: f64,
    pub shots: u64,
}

impl ChiEstimate {
    /// With `k` of `n` shots in `|11⟩`: `asin(√(k/n))` with binomial error
    /// `1/(2√n)`. When `k = 0` the uncertainty is the rule-of-three bound
    /// `asin(√(3/n))`, mirrored when `k = n`.
    pub fn from_counts(count_11: u64, shots: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::NoShots);
        }
        let n = shots as f64;
        let frequency = (count_11 as f64 / n).min(1.0);
        let chi = libm::asin(libm::sqrt(frequency));
        let edge = libm::asin(libm::sqrt((3.0 / n).min(1.0)));
        let uncertainty = if count_11 == 0 {
            edge
        } else if count_11 >= shots {
            core::f64::consts::FRAC_PI_2 - libm::asin(libm::sqrt((1.0 - 3.0 / n).max(0.0)))
        } else {
            0.5 / libm::sqrt(n)
        };
        Ok(Self { chi, uncertainty, shots })
    }

    /// Estimate from an exact `|11⟩` probability, with the error a run of
    /// `shots` would have.
    pub fn from_probability(p_11: f64, shots: u64) -> Result<Self> {
        let mut est = Self::from_counts((libm::round(p_11 * shots as f64) as u64).min(shots), shots)?;
        est.chi = libm::asin(libm::sqrt(p_11.clamp(0.0, 1.0)));
        Ok(est)
    }
}

/// Calibration run: samples `J(χ)|00⟩` under `noise` and inverts `sin²χ`.
pub fn measure_chi<R: Rng + ?Sized>(
    noise: &NoiseModel,
    nominal_chi: f64,
    shots: usize,
    rng: &mut R,
) -> Result<ChiEstimate> {
    let circuit = Circuit::new(2, vec![Gate::Entangle { a: 0, b: 1, chi: nominal_chi }])?;
    let outcomes = sample_outcomes(&circuit, noise, shots, rng)?;
    let count = outcomes.iter().filter(|&&o| o == 0b11).count() as u64;
    ChiEstimate::from_counts(count, shots as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn paper_like_profile_is_valid() {
        assert!(NoiseModel::paper_like().validate().is_ok());
        let bad = NoiseModel { two_qubit_depol: 0.7, ..NoiseModel::noiseless() };
        assert!(matches!(bad.validate(), Err(Error::InvalidNoise { name: "two_qubit_depol", .. })));
        let bad = NoiseModel { chi_jitter_sigma: -1.0, ..NoiseModel::noiseless() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn identity_confusion_leaves_populations() {
        let pops = PopulationVector::from_counts(&[3, 0, 5, 1, 0, 0, 0, 7, 2, 2, 2, 2, 0, 0, 0, 1, 1, 1, 1, 1, 9, 0, 0, 0, 4, 4, 4, 4, 0, 0, 0, 3]);
        let out = spam_correct(&pops, &ConfusionMatrix::identity(5)).unwrap();
        assert_eq!(out, pops);
    }

    #[test]
    fn flip_confusion_columns() {
        let c = ConfusionMatrix::from_noise(&NoiseModel::readout_only(0.1), 2).unwrap();
        assert!((c.get(0, 0) - 0.81).abs() < 1e-15);
        assert!((c.get(3, 0) - 0.01).abs() < 1e-15);
        assert!((c.get(1, 0) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn confusion_validation() {
        assert!(matches!(ConfusionMatrix::from_row_major(2, &[0.5; 16]), Err(Error::NotStochastic { column: 0, .. })));
        let rank_one = [0.25; 16];
        assert!(matches!(ConfusionMatrix::from_row_major(2, &rank_one), Err(Error::Singular(_))));
        assert!(matches!(ConfusionMatrix::from_row_major(2, &[0.25; 15]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn large_negative_correction_is_rejected() {
        let c = ConfusionMatrix::from_noise(&NoiseModel::readout_only(0.2), 2).unwrap();
        // A population with nothing in 01 and 10 while 00 is large cannot come
        // from this readout map.
        let pops = PopulationVector::from_counts(&[1000, 0, 0, 0]);
        assert!(matches!(spam_correct(&pops, &c), Err(Error::NegativePopulation { .. })));
    }

    #[test]
    fn split_extremes() {
        let outcomes: Vec<u8> = (0..100).map(|i| (i % 32) as u8).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (b1, b2) = bayesian_split(&outcomes, 5, 1.0, &mut rng).unwrap();
        assert_eq!((b1.shot_count(), b2.shot_count()), (100, 0));
        let (b1, b2) = bayesian_split(&outcomes, 5, 0.0, &mut rng).unwrap();
        assert_eq!((b1.shot_count(), b2.shot_count()), (0, 100));
        assert!(bayesian_split(&outcomes, 5, 1.1, &mut rng).is_err());
    }

    #[test]
    fn chi_estimate_inverts_exact_probability() {
        let chi = 0.125 * core::f64::consts::PI;
        let p = libm::sin(chi) * libm::sin(chi);
        let est = ChiEstimate::from_probability(p, 30_000).unwrap();
        assert!((est.chi - chi).abs() < 1e-12);
        assert!((est.uncertainty - 0.5 / libm::sqrt(30_000.0)).abs() < 1e-15);
    }

    #[test]
    fn chi_estimate_zero_counts_uses_rule_of_three() {
        let est = ChiEstimate::from_counts(0, 30_000).unwrap();
        assert_eq!(est.chi, 0.0);
        assert!((est.uncertainty - libm::asin(libm::sqrt(1e-4))).abs() < 1e-15);
        assert_eq!(ChiEstimate::from_counts(0, 0), Err(Error::NoShots));
    }

    #[test]
    fn zero_shots_rejected() {
        let c = Circuit::new(2, vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_outcomes(&c, &NoiseModel::noiseless(), 0, &mut rng), Err(Error::NoShots));
    }
}
