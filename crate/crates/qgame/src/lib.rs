//! Sweeps, file formats and reports on top of `qgame-core`.

pub mod analyses;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

pub use config::{ExperimentConfig, Mode};
pub use error::{HarnessError, Result};
pub use sweep::{run_sweep, SweepResult};
