//! Experiment configuration as read from JSON.
//!
//! All χ-valued fields in files are in units of π; the library works in
//! radians.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use qgame_core::circuit::QUBITS;
use qgame_core::equilibrium::{ANALYTIC_DELTA, DEFAULT_TRANSITION_WINDOW, SHOT_DELTA};
use qgame_core::game::PayoffTable;
use qgame_core::noise::{ConfusionMatrix, NoiseModel, DEFAULT_NEGATIVE_TOLERANCE};
use qgame_core::statevector::CHI_MAX;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    #[serde(alias = "shot_emulation")]
    #[value(alias = "shot-emulation")]
    Shots,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Shots => "shots",
        }
    }
}

/// `{"rows": [[[A, B], ...], ...]}` with the row index A's outcome and the
/// column index B's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffTableConfig {
    pub rows: [[[f64; 2]; 2]; 2],
}

impl From<&PayoffTable> for PayoffTableConfig {
    fn from(t: &PayoffTable) -> Self {
        Self { rows: *t.rows() }
    }
}

impl PayoffTableConfig {
    pub fn table(&self) -> Result<PayoffTable> {
        PayoffTable::new(self.rows).map_err(|e| HarnessError::Config(format!("payoff table: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PayoffTables {
    pub b1: PayoffTableConfig,
    pub b2: PayoffTableConfig,
}

impl Default for PayoffTables {
    fn default() -> Self {
        Self {
            b1: (&PayoffTable::prisoners_dilemma()).into(),
            b2: (&PayoffTable::asymmetric_dilemma()).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub single_qubit_depol: f64,
    pub two_qubit_depol: f64,
    pub readout_flip_0to1: f64,
    pub readout_flip_1to0: f64,
    pub readout_crosstalk: f64,
    /// Units of π.
    pub chi_offset: f64,
    /// Units of π.
    pub chi_jitter_sigma: f64,
    /// Dimensionless: extra spread per unit of nominal χ.
    pub chi_jitter_slope: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::from(&NoiseModel::paper_like())
    }
}

impl From<&NoiseModel> for NoiseConfig {
    fn from(n: &NoiseModel) -> Self {
        Self {
            single_qubit_depol: n.single_qubit_depol,
            two_qubit_depol: n.two_qubit_depol,
            readout_flip_0to1: n.readout_flip_0to1,
            readout_flip_1to0: n.readout_flip_1to0,
            readout_crosstalk: n.readout_crosstalk,
            chi_offset: n.chi_offset / PI,
            chi_jitter_sigma: n.chi_jitter_sigma / PI,
            chi_jitter_slope: n.chi_jitter_slope,
            seed: n.seed,
        }
    }
}

impl NoiseConfig {
    pub fn model(&self) -> Result<NoiseModel> {
        let model = NoiseModel {
            single_qubit_depol: self.single_qubit_depol,
            two_qubit_depol: self.two_qubit_depol,
            readout_flip_0to1: self.readout_flip_0to1,
            readout_flip_1to0: self.readout_flip_1to0,
            readout_crosstalk: self.readout_crosstalk,
            chi_offset: self.chi_offset * PI,
            chi_jitter_sigma: self.chi_jitter_sigma * PI,
            chi_jitter_slope: self.chi_jitter_slope,
            seed: self.seed,
        };
        model.validate().map_err(|e| HarnessError::Config(format!("noise: {e}")))?;
        Ok(model)
    }
}

pub fn default_chi_grid_pi() -> Vec<f64> {
    vec![0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2, 0.225, 0.25]
}

pub fn default_p_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub payoffs: PayoffTables,
    /// Nominal χ values in units of π.
    pub chi_grid_pi: Vec<f64>,
    pub p_grid: Vec<f64>,
    /// Best-response tolerance; 0 for analytic and 0.1 for shot mode when unset.
    pub delta: Option<f64>,
    /// Shots per circuit variant, and for the χ calibration run.
    pub shots: usize,
    pub noise: NoiseConfig,
    pub mode: Mode,
    /// Master seed; falls back to `noise.seed`.
    pub seed: Option<u64>,
    /// 32×32 confusion matrix, `row = observed`, `column = prepared`. Built
    /// from the noise model when unset.
    pub confusion_csv: Option<PathBuf>,
    pub spam_correction: bool,
    pub spam_negative_tolerance: f64,
    pub transition_window: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            payoffs: PayoffTables::default(),
            chi_grid_pi: default_chi_grid_pi(),
            p_grid: default_p_grid(),
            delta: None,
            shots: 30_000,
            noise: NoiseConfig::default(),
            mode: Mode::Analytic,
            seed: None,
            confusion_csv: None,
            spam_correction: true,
            spam_negative_tolerance: DEFAULT_NEGATIVE_TOLERANCE,
            transition_window: DEFAULT_TRANSITION_WINDOW,
            out_dir: None,
        }
    }
}

fn check_grid(name: &str, grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(HarnessError::Config(format!("{name} is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !(v.is_finite() && (lo..=hi).contains(*v))) {
        return Err(HarnessError::Config(format!("{name} value {v} outside [{lo}, {hi}]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HarnessError::Config(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Reads a config file. A relative `confusion_csv` is resolved against
    /// the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.into(), source })?;
        let mut config: Self =
            serde_json::from_str(&text).map_err(|source| HarnessError::Json { path: path.into(), source })?;
        if let (Some(csv), Some(dir)) = (&config.confusion_csv, path.parent()) {
            if csv.is_relative() {
                config.confusion_csv = Some(dir.join(csv));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_grid("chi_grid_pi", &self.chi_grid_pi, 0.0, CHI_MAX / PI)?;
        check_grid("p_grid", &self.p_grid, 0.0, 1.0)?;
        if let Some(d) = self.delta {
            if !(d.is_finite() && d >= 0.0) {
                return Err(HarnessError::Config(format!("delta must be non-negative, got {d}")));
            }
        }
        if self.shots == 0 {
            return Err(HarnessError::Config("shots must be positive".into()));
        }
        if !(self.spam_negative_tolerance.is_finite() && self.spam_negative_tolerance >= 0.0) {
            return Err(HarnessError::Config("spam_negative_tolerance must be non-negative".into()));
        }
        if self.transition_window == 0 {
            return Err(HarnessError::Config("transition_window must be at least 1".into()));
        }
        self.payoffs.b1.table()?;
        self.payoffs.b2.table()?;
        self.noise.model()?;
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(match self.mode {
            Mode::Analytic => ANALYTIC_DELTA,
            Mode::Shots => SHOT_DELTA,
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.seed.unwrap_or(self.noise.seed)
    }

    pub fn tables(&self) -> Result<(PayoffTable, PayoffTable)> {
        Ok((self.payoffs.b1.table()?, self.payoffs.b2.table()?))
    }

    /// The readout map used for correction: from `confusion_csv` when given,
    /// otherwise the one implied by the noise model.
    pub fn confusion(&self) -> Result<ConfusionMatrix> {
        match &self.confusion_csv {
            Some(path) => load_confusion_csv(path),
            None => Ok(ConfusionMatrix::from_noise(&self.noise.model()?, QUBITS)?),
        }
    }
}

/// Reads a headerless 32×32 CSV of `P(observed = row | prepared = column)`.
pub fn load_confusion_csv(path: &Path) -> Result<ConfusionMatrix> {
    let csv_err = |source| HarnessError::Csv { path: path.into(), source };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut values = Vec::with_capacity(1 << (2 * QUBITS));
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        if record.len() != 1 << QUBITS {
            return Err(HarnessError::Config(format!(
                "{}: expected {} columns, found {}",
                path.display(),
                1 << QUBITS,
                record.len()
            )));
        }
        for field in &record {
            values.push(field.parse::<f64>().map_err(|e| {
                HarnessError::Config(format!("{}: bad number {field:?}: {e}", path.display()))
            })?);
        }
    }
    ConfusionMatrix::from_row_major(QUBITS, &values)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}
