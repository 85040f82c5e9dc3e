//! χ × p grid evaluation in analytic and shot-emulation modes.
//!
//! Cells are computed in parallel and gathered in grid order, so results do
//! not depend on scheduling. Every random draw comes from a stream keyed by
//! grid values (see [`qgame_core::rng`]).

use std::f64::consts::PI;

use qgame_core::bayesian::{compose, BayesianPayoffTensor, StrategyProfile};
use qgame_core::circuit::Variant;
use qgame_core::emulation::{shot_bayesian_tensor, ShotDataset, SpamCorrection};
use qgame_core::equilibrium::{
    detect_transitions, nash_equilibria, rmsd_at, EquilibriumReport, ANALYTIC_DELTA,
};
use qgame_core::game::{payoff_tensor, GameSpec, Opponent, PayoffTable};
use qgame_core::noise::{measure_chi, ChiEstimate, NoiseModel};
use qgame_core::rng::{child_rng, Purpose, StreamKey};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// Computed, but without readout correction because it produced large
    /// negative populations.
    Degraded,
    Failed,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Degraded => "degraded",
            CellStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub profile: String,
    /// `[A, B1, B2]`.
    pub payoffs: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub chi_nominal_pi: f64,
    pub chi_measured_pi: Option<f64>,
    pub chi_uncertainty_pi: Option<f64>,
    pub p: f64,
    pub status: CellStatus,
    pub message: Option<String>,
    pub equilibria: Vec<EquilibriumRow>,
    /// Payoff RMSD against the analytic tensor at nominal χ, taken at the
    /// analytic maximal-payoff equilibrium.
    pub rmsd: Option<f64>,
    pub rmsd_profile: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Enters,
    Leaves,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Enters => "enters",
            Direction::Leaves => "leaves",
        }
    }
}

impl From<qgame_core::equilibrium::Direction> for Direction {
    fn from(d: qgame_core::equilibrium::Direction) -> Self {
        match d {
            qgame_core::equilibrium::Direction::Enters => Direction::Enters,
            qgame_core::equilibrium::Direction::Leaves => Direction::Leaves,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub p: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTransitions {
    pub profile: String,
    pub thresholds: Vec<ThresholdRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiTransitions {
    pub chi_nominal_pi: f64,
    pub window: usize,
    pub profiles: Vec<ProfileTransitions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub mode: Mode,
    /// Absent in analytic mode, which draws no random numbers.
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub delta: f64,
    pub chi_grid_pi: Vec<f64>,
    pub p_grid: Vec<f64>,
    /// χ-major, p-minor.
    pub cells: Vec<Cell>,
    pub transitions: Vec<ChiTransitions>,
}

impl SweepResult {
    pub fn cell(&self, chi_pi: f64, p: f64) -> Option<&Cell> {
        self.cells.iter().find(|c| c.chi_nominal_pi == chi_pi && c.p == p)
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.status == CellStatus::Failed).count()
    }

    pub fn transitions_at(&self, chi_pi: f64) -> Option<&ChiTransitions> {
        self.transitions.iter().find(|t| t.chi_nominal_pi == chi_pi)
    }
}

pub fn analytic_tensor(chi: f64, p: f64, vs_b1: &PayoffTable, vs_b2: &PayoffTable) -> Result<BayesianPayoffTensor> {
    let spec = GameSpec::new(chi, *vs_b1, *vs_b2)?;
    Ok(compose(&payoff_tensor(&spec, Opponent::B1), &payoff_tensor(&spec, Opponent::B2), p)?)
}

/// RMSD of `observed` against `reference` at the reference's maximal-payoff
/// exact equilibrium, with that profile.
pub fn rmsd_vs_reference(
    observed: &BayesianPayoffTensor,
    reference: &BayesianPayoffTensor,
) -> Result<Option<(f64, StrategyProfile)>> {
    let report = nash_equilibria(reference, ANALYTIC_DELTA)?;
    Ok(report.max_payoff().map(|eq| (rmsd_at(observed, reference, eq.profile), eq.profile)))
}

/// Everything drawn once per χ in shot mode.
pub struct ChiData {
    pub dataset: ShotDataset,
    pub estimate: ChiEstimate,
}

pub fn sample_chi(chi: f64, noise: &NoiseModel, shots: usize, seed: u64) -> Result<ChiData> {
    let mut rng_i = child_rng(seed, StreamKey::new(chi, None, Purpose::Shots(Variant::I)));
    let mut rng_x = child_rng(seed, StreamKey::new(chi, None, Purpose::Shots(Variant::X)));
    let dataset = ShotDataset::sample(chi, noise, shots, &mut rng_i, &mut rng_x)?;
    let mut rng_c = child_rng(seed, StreamKey::new(chi, None, Purpose::ChiCalibration));
    let estimate = measure_chi(noise, chi, shots, &mut rng_c)?;
    Ok(ChiData { dataset, estimate })
}

/// Shot-derived tensor for one `p`. A readout correction that fails on
/// negative populations is dropped and reported.
pub fn shot_tensor(
    data: &ShotDataset,
    tables: (&PayoffTable, &PayoffTable),
    p: f64,
    correction: Option<&SpamCorrection>,
    seed: u64,
) -> Result<(BayesianPayoffTensor, Option<String>)> {
    let key = StreamKey::new(data.chi, Some(p), Purpose::BayesianSplit);
    let run = |c| shot_bayesian_tensor(data, tables.0, tables.1, p, c, &mut child_rng(seed, key));
    match run(correction) {
        Err(e @ qgame_core::Error::NegativePopulation { .. }) if correction.is_some() => {
            Ok((run(None)?, Some(format!("readout correction skipped: {e}"))))
        }
        other => Ok((other?, None)),
    }
}

struct CellOutcome {
    cell: Cell,
    report: Option<EquilibriumReport>,
}

fn rows(report: &EquilibriumReport) -> Vec<EquilibriumRow> {
    report
        .equilibria
        .iter()
        .map(|e| EquilibriumRow { profile: e.profile.to_string(), payoffs: e.payoffs })
        .collect()
}

fn failed(chi_pi: f64, p: f64, message: String) -> CellOutcome {
    CellOutcome {
        cell: Cell {
            chi_nominal_pi: chi_pi,
            chi_measured_pi: None,
            chi_uncertainty_pi: None,
            p,
            status: CellStatus::Failed,
            message: Some(message),
            equilibria: Vec::new(),
            rmsd: None,
            rmsd_profile: None,
        },
        report: None,
    }
}

fn analytic_column(config: &ExperimentConfig, chi_pi: f64, tables: &(PayoffTable, PayoffTable)) -> Vec<CellOutcome> {
    let delta = config.delta();
    config
        .p_grid
        .par_iter()
        .map(|&p| {
            let run = || -> Result<EquilibriumReport> {
                Ok(nash_equilibria(&analytic_tensor(chi_pi * PI, p, &tables.0, &tables.1)?, delta)?)
            };
            match run() {
                Ok(report) => CellOutcome {
                    cell: Cell {
                        chi_nominal_pi: chi_pi,
                        chi_measured_pi: None,
                        chi_uncertainty_pi: None,
                        p,
                        status: CellStatus::Ok,
                        message: None,
                        equilibria: rows(&report),
                        rmsd: None,
                        rmsd_profile: None,
                    },
                    report: Some(report),
                },
                Err(e) => failed(chi_pi, p, e.to_string()),
            }
        })
        .collect()
}

fn shot_column(
    config: &ExperimentConfig,
    chi_pi: f64,
    tables: &(PayoffTable, PayoffTable),
    noise: &NoiseModel,
    correction: Option<&SpamCorrection>,
) -> Vec<CellOutcome> {
    let chi = chi_pi * PI;
    let seed = config.master_seed();
    let delta = config.delta();
    let data = match sample_chi(chi, noise, config.shots, seed) {
        Ok(d) => d,
        Err(e) => return config.p_grid.iter().map(|&p| failed(chi_pi, p, e.to_string())).collect(),
    };
    config
        .p_grid
        .par_iter()
        .map(|&p| {
            let run = || -> Result<CellOutcome> {
                let (observed, note) = shot_tensor(&data.dataset, (&tables.0, &tables.1), p, correction, seed)?;
                let reference = analytic_tensor(chi, p, &tables.0, &tables.1)?;
                let report = nash_equilibria(&observed, delta)?;
                let rmsd = rmsd_vs_reference(&observed, &reference)?;
                Ok(CellOutcome {
                    cell: Cell {
                        chi_nominal_pi: chi_pi,
                        chi_measured_pi: Some(data.estimate.chi / PI),
                        chi_uncertainty_pi: Some(data.estimate.uncertainty / PI),
                        p,
                        status: if note.is_some() { CellStatus::Degraded } else { CellStatus::Ok },
                        message: note,
                        equilibria: rows(&report),
                        rmsd: rmsd.map(|r| r.0),
                        rmsd_profile: rmsd.map(|r| r.1.to_string()),
                    },
                    report: Some(report),
                })
            };
            run().unwrap_or_else(|e| failed(chi_pi, p, e.to_string()))
        })
        .collect()
}

fn column_transitions(chi_pi: f64, outcomes: &[CellOutcome], window: usize) -> Result<ChiTransitions> {
    let reports: Vec<EquilibriumReport> = outcomes.iter().filter_map(|o| o.report.clone()).collect();
    let mut seen = [false; StrategyProfile::COUNT];
    for r in &reports {
        for profile in r.profiles() {
            seen[profile.index()] = true;
        }
    }
    let mut profiles = Vec::new();
    for profile in StrategyProfile::all().filter(|s| seen[s.index()]) {
        let t = detect_transitions(&reports, profile, window)?;
        profiles.push(ProfileTransitions {
            profile: profile.to_string(),
            thresholds: t.thresholds.iter().map(|t| ThresholdRow { p: t.p, direction: t.direction.into() }).collect(),
        });
    }
    Ok(ChiTransitions { chi_nominal_pi: chi_pi, window, profiles })
}

/// Evaluates the full grid. Cell-level failures are recorded in the result;
/// only an invalid configuration is an error.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let tables = config.tables()?;
    let noise = config.noise.model()?;
    let correction = match (config.mode, config.spam_correction) {
        (Mode::Shots, true) => Some(SpamCorrection {
            confusion: config.confusion()?,
            negative_tolerance: config.spam_negative_tolerance,
        }),
        _ => None,
    };

    let columns: Vec<Vec<CellOutcome>> = config
        .chi_grid_pi
        .par_iter()
        .map(|&chi_pi| match config.mode {
            Mode::Analytic => analytic_column(config, chi_pi, &tables),
            Mode::Shots => shot_column(config, chi_pi, &tables, &noise, correction.as_ref()),
        })
        .collect();

    let mut transitions = Vec::with_capacity(columns.len());
    for (&chi_pi, column) in config.chi_grid_pi.iter().zip(&columns) {
        transitions.push(column_transitions(chi_pi, column, config.transition_window)?);
    }
    let shot_mode = config.mode == Mode::Shots;
    Ok(SweepResult {
        schema_version: SCHEMA_VERSION,
        mode: config.mode,
        seed: shot_mode.then(|| config.master_seed()),
        shots: shot_mode.then_some(config.shots),
        delta: config.delta(),
        chi_grid_pi: config.chi_grid_pi.clone(),
        p_grid: config.p_grid.clone(),
        cells: columns.into_iter().flatten().map(|o| o.cell).collect(),
        transitions,
    })
}
