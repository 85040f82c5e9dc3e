//! The figure-level analyses behind the `verify`, `rmsd` and `thresholds`
//! subcommands.

use std::f64::consts::PI;

use qgame_core::bayesian::StrategyProfile;
use qgame_core::circuit::{verify_parallelization, BranchMap, ParallelizationCheck};
use qgame_core::emulation::SpamCorrection;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::report::{RmsdLine, ThresholdLine};
use crate::sweep::{analytic_tensor, rmsd_vs_reference, run_sweep, sample_chi, shot_tensor, SweepResult};

pub fn verify(chi_grid_pi: &[f64]) -> Result<Vec<ParallelizationCheck>> {
    let radians: Vec<f64> = chi_grid_pi.iter().map(|c| c * PI).collect();
    Ok(verify_parallelization(&radians, &BranchMap::standard())?)
}

/// Shot-mode payoff RMSD at the analytic maximal-payoff equilibrium, for
/// every χ of the grid at a fixed `p`, averaged over `seeds` consecutive
/// master seeds starting at the configured one.
pub fn rmsd_scan(config: &ExperimentConfig, p: f64, seeds: usize) -> Result<Vec<RmsdLine>> {
    config.validate()?;
    let tables = config.tables()?;
    let noise = config.noise.model()?;
    let correction = if config.spam_correction {
        Some(SpamCorrection { confusion: config.confusion()?, negative_tolerance: config.spam_negative_tolerance })
    } else {
        None
    };
    let seeds = seeds.max(1);
    config
        .chi_grid_pi
        .par_iter()
        .map(|&chi_pi| {
            let chi = chi_pi * PI;
            let reference = analytic_tensor(chi, p, &tables.0, &tables.1)?;
            let runs: Vec<(f64, Option<(f64, StrategyProfile)>)> = (0..seeds as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = config.master_seed().wrapping_add(i);
                    let data = sample_chi(chi, &noise, config.shots, seed)?;
                    let (observed, _) = shot_tensor(&data.dataset, (&tables.0, &tables.1), p, correction.as_ref(), seed)?;
                    Ok((data.estimate.chi, rmsd_vs_reference(&observed, &reference)?))
                })
                .collect::<Result<_>>()?;
            let n = runs.len() as f64;
            let measured = runs.iter().map(|r| r.0).sum::<f64>() / n;
            let values: Vec<f64> = runs.iter().filter_map(|r| r.1.map(|x| x.0)).collect();
            let profile = runs.iter().find_map(|r| r.1.map(|x| x.1.to_string())).unwrap_or_default();
            let (mean, std) = if values.is_empty() {
                (None, None)
            } else {
                let k = values.len() as f64;
                let mean = values.iter().sum::<f64>() / k;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
                (Some(mean), Some(var.sqrt()))
            };
            Ok(RmsdLine {
                chi_nominal_pi: chi_pi,
                chi_measured_pi: measured / PI,
                p,
                profile,
                rmsd_mean: mean,
                rmsd_std: std,
                seeds,
            })
        })
        .collect()
}

fn lines_for(result: &SweepResult, filter: Option<StrategyProfile>) -> Vec<ThresholdLine> {
    let wanted = filter.map(|s| s.to_string());
    let mut out = Vec::new();
    for column in &result.transitions {
        for t in column.profiles.iter().filter(|t| wanted.as_ref().is_none_or(|w| *w == t.profile)) {
            for th in &t.thresholds {
                out.push(ThresholdLine {
                    chi_nominal_pi: column.chi_nominal_pi,
                    profile: t.profile.clone(),
                    direction: th.direction,
                    p: th.p,
                    mode: result.mode.as_str().into(),
                    deviation: None,
                });
            }
        }
    }
    out
}

/// Equilibrium transition thresholds along `p` for each χ, in the requested
/// modes. With both modes, each shot-mode threshold carries its distance to
/// the nearest analytic threshold of the same profile and direction.
pub fn thresholds(
    config: &ExperimentConfig,
    modes: &[Mode],
    profile: Option<StrategyProfile>,
) -> Result<Vec<ThresholdLine>> {
    let mut by_mode = Vec::new();
    for &mode in modes {
        let result = run_sweep(&ExperimentConfig { mode, ..config.clone() })?;
        by_mode.push((mode, lines_for(&result, profile)));
    }
    let analytic: Vec<ThresholdLine> =
        by_mode.iter().filter(|(m, _)| *m == Mode::Analytic).flat_map(|(_, l)| l.clone()).collect();
    let mut out = Vec::new();
    for &chi in &config.chi_grid_pi {
        for (mode, lines) in &by_mode {
            for line in lines.iter().filter(|l| l.chi_nominal_pi == chi) {
                let mut line = line.clone();
                if *mode == Mode::Shots && !analytic.is_empty() {
                    line.deviation = analytic
                        .iter()
                        .filter(|a| a.chi_nominal_pi == chi && a.profile == line.profile && a.direction == line.direction)
                        .map(|a| line.p - a.p)
                        .min_by(|x, y| x.abs().total_cmp(&y.abs()));
                }
                out.push(line);
            }
        }
    }
    Ok(out)
}
