use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgame::analyses;
use qgame::config::{default_chi_grid_pi, ExperimentConfig, Mode};
use qgame::report::{self, write_rmsd_csv, write_thresholds_csv, write_verify_csv};
use qgame::{run_sweep, HarnessError, Result};
use qgame_core::bayesian::StrategyProfile;

#[derive(Parser)]
#[command(name = "qgame", version, about = "Bayesian quantum game sweeps, emulated shots and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (JSON). Defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdMode {
    Analytic,
    Shots,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibria and payoffs over the χ × p grid (sweep.csv, sweep.json).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Checks that the two parallel circuits reproduce all 16 strategy pairs.
    Verify {
        /// χ values in units of π, comma separated.
        #[arg(long, value_delimiter = ',')]
        chi_grid: Option<Vec<f64>>,
        /// Also write verify.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shot-mode payoff RMSD against theory at each χ (rmsd.csv).
    Rmsd {
        #[command(flatten)]
        common: Common,
        /// Number of consecutive master seeds to average over.
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
    },
    /// Where equilibria enter or leave along p at each χ (thresholds.csv).
    Thresholds {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "analytic")]
        mode: ThresholdMode,
        /// Restrict to one profile, e.g. IXI.
        #[arg(long, value_parser = parse_profile)]
        profile: Option<StrategyProfile>,
    },
}

fn parse_profile(s: &str) -> std::result::Result<StrategyProfile, String> {
    s.parse().map_err(|_| format!("`{s}` is not a profile such as IXI"))
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if common.seed.is_some() {
        config.seed = common.seed;
    }
    if common.out.is_some() {
        config.out_dir = common.out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    config.out_dir.clone().unwrap_or_else(|| PathBuf::from("qgame-out"))
}

fn show(path: &Path) {
    println!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep { common, mode } => {
            let mut config = load(&common)?;
            if let Some(mode) = mode {
                config.mode = mode;
            }
            let dir = out_dir(&config);
            report::prepare_out_dir(&dir)?;
            let result = run_sweep(&config)?;
            let (csv, json) = report::emit_sweep(&result, &dir)?;
            show(&csv);
            show(&json);
            for cell in result.cells.iter().filter(|c| c.message.is_some()) {
                eprintln!(
                    "chi={}pi p={}: {} ({})",
                    cell.chi_nominal_pi,
                    cell.p,
                    cell.status.as_str(),
                    cell.message.as_deref().unwrap_or_default()
                );
            }
            match result.failures() {
                0 => Ok(()),
                n => Err(HarnessError::CellFailures(n)),
            }
        }
        Command::Verify { chi_grid, out } => {
            let grid = chi_grid.unwrap_or_else(default_chi_grid_pi);
            if let Some(bad) = grid.iter().find(|c| !(0.0..=0.25).contains(*c)) {
                return Err(HarnessError::Config(format!("chi {bad} outside [0, 0.25] (units of pi)")));
            }
            let checks = analyses::verify(&grid)?;
            write_verify_csv(&grid, &checks, std::io::stdout().lock())
                .map_err(|e| HarnessError::Write { path: "<stdout>".into(), source: std::io::Error::other(e) })?;
            if let Some(dir) = out {
                show(&report::emit_csv(&dir, "verify.csv", |w| write_verify_csv(&grid, &checks, w))?);
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(HarnessError::VerifyFailed(n)),
            }
        }
        Command::Rmsd { common, seeds, p } => {
            let config = load(&common)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(HarnessError::Config(format!("p = {p} outside [0, 1]")));
            }
            let dir = out_dir(&config);
            report::prepare_out_dir(&dir)?;
            let lines = analyses::rmsd_scan(&config, p, seeds)?;
            show(&report::emit_csv(&dir, "rmsd.csv", |w| write_rmsd_csv(&lines, w))?);
            Ok(())
        }
        Command::Thresholds { common, mode, profile } => {
            let config = load(&common)?;
            let modes: &[Mode] = match mode {
                ThresholdMode::Analytic => &[Mode::Analytic],
                ThresholdMode::Shots => &[Mode::Shots],
                ThresholdMode::Both => &[Mode::Analytic, Mode::Shots],
            };
            let dir = out_dir(&config);
            report::prepare_out_dir(&dir)?;
            let lines = analyses::thresholds(&config, modes, profile)?;
            show(&report::emit_csv(&dir, "thresholds.csv", |w| write_thresholds_csv(&lines, w))?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
