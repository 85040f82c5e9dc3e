//! CSV and JSON output.
//!
//! Floats are written in Rust's shortest round-trip form, so output is
//! byte-stable for fixed inputs. χ values are in units of π.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qgame_core::circuit::ParallelizationCheck;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::sweep::{Direction, SweepResult};

pub const SWEEP_HEADER: [&str; 13] = [
    "chi_nominal_pi",
    "chi_measured_pi",
    "p",
    "n_equilibria",
    "profile",
    "payoff_A",
    "payoff_B1",
    "payoff_B2",
    "rmsd",
    "delta",
    "mode",
    "seed",
    "status",
];

fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write_err(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Write { path: path.into(), source }
}

fn csv_write_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => HarnessError::Write { path: path.into(), source },
        other => HarnessError::Write { path: path.into(), source: std::io::Error::other(format!("{other:?}")) },
    }
}

/// Creates `dir` if needed and checks that it accepts files.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(write_err(dir))?;
    let probe = dir.join(".qgame-write-test");
    File::create(&probe).map_err(write_err(dir))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

/// One row per equilibrium; a cell without equilibria still gets one row
/// with `n_equilibria = 0` and empty profile and payoff fields.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for cell in &result.cells {
        let fixed = |profile: String, payoffs: [String; 3]| {
            let [a, b1, b2] = payoffs;
            [
                num(cell.chi_nominal_pi),
                opt(cell.chi_measured_pi),
                num(cell.p),
                cell.equilibria.len().to_string(),
                profile,
                a,
                b1,
                b2,
                opt(cell.rmsd),
                num(result.delta),
                result.mode.as_str().to_string(),
                result.seed.map(|s| s.to_string()).unwrap_or_default(),
                cell.status.as_str().to_string(),
            ]
        };
        if cell.equilibria.is_empty() {
            w.write_record(fixed(String::new(), Default::default()))?;
        }
        for eq in &cell.equilibria {
            w.write_record(fixed(eq.profile.clone(), eq.payoffs.map(num)))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(write_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| HarnessError::Write { path: path.into(), source: e.into() })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(write_err(path))
}

pub fn load_sweep_json(path: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json { path: path.into(), source })
}

/// Writes `sweep.csv` and `sweep.json` into `dir`.
pub fn emit_sweep(result: &SweepResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    prepare_out_dir(dir)?;
    let csv_path = dir.join("sweep.csv");
    let file = File::create(&csv_path).map_err(write_err(&csv_path))?;
    write_sweep_csv(result, BufWriter::new(file)).map_err(csv_write_err(&csv_path))?;
    let json_path = dir.join("sweep.json");
    write_json(result, &json_path)?;
    Ok((csv_path, json_path))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdLine {
    pub chi_nominal_pi: f64,
    pub profile: String,
    pub direction: Direction,
    pub p: f64,
    pub mode: String,
    /// Shot-mode threshold minus the matching analytic one.
    pub deviation: Option<f64>,
}

pub fn write_thresholds_csv<W: Write>(lines: &[ThresholdLine], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["chi_nominal_pi", "profile", "direction", "p", "mode", "deviation"])?;
    for l in lines {
        w.write_record([
            num(l.chi_nominal_pi),
            l.profile.clone(),
            l.direction.as_str().to_string(),
            num(l.p),
            l.mode.clone(),
            opt(l.deviation),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmsdLine {
    pub chi_nominal_pi: f64,
    pub chi_measured_pi: f64,
    pub p: f64,
    /// Empty when the analytic game has no equilibrium at this cell.
    pub profile: String,
    pub rmsd_mean: Option<f64>,
    pub rmsd_std: Option<f64>,
    pub seeds: usize,
}

pub fn write_rmsd_csv<W: Write>(lines: &[RmsdLine], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["chi_nominal_pi", "chi_measured_pi", "p", "profile", "rmsd_mean", "rmsd_std", "seeds"])?;
    for l in lines {
        w.write_record([
            num(l.chi_nominal_pi),
            num(l.chi_measured_pi),
            num(l.p),
            l.profile.clone(),
            opt(l.rmsd_mean),
            opt(l.rmsd_std),
            l.seeds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_verify_csv<W: Write>(chi_grid_pi: &[f64], checks: &[ParallelizationCheck], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["chi_pi", "max_deviation", "aux_marginal_deviation", "worst_branch", "passed"])?;
    for (chi, c) in chi_grid_pi.iter().zip(checks) {
        let worst = c
            .worst
            .map(|(v, b, (a, bb))| {
                let (x, y, z) = b.bits();
                format!("{v:?}:{}{}{}:{a}{bb}", x as u8, y as u8, z as u8)
            })
            .unwrap_or_default();
        w.write_record([
            num(*chi),
            num(c.max_deviation),
            num(c.aux_marginal_deviation),
            worst,
            c.passed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `dir/name` and hands a buffered writer to `write`.
pub fn emit_csv<F>(dir: &Path, name: &str, write: F) -> Result<PathBuf>
where
    F: FnOnce(BufWriter<File>) -> csv::Result<()>,
{
    prepare_out_dir(dir)?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(write_err(&path))?;
    write(BufWriter::new(file)).map_err(csv_write_err(&path))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, Mode};
    use crate::sweep::run_sweep;

    fn result() -> SweepResult {
        run_sweep(&ExperimentConfig {
            chi_grid_pi: vec![0.0, 0.2],
            p_grid: vec![0.0, 0.5],
            mode: Mode::Analytic,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn csv_row_shapes() {
        let text = sweep_csv_string(&result());
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER.join(","));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        let classical: Vec<_> = rows.iter().filter(|r| r[0] == "0" && r[2] == "0").collect();
        assert_eq!(classical.len(), 8);
        assert!(classical.iter().all(|r| r[3] == "8"));
        assert!(classical.iter().any(|r| r[4] == "IXI" && r[5..8] == ["11", "10", "9"]));
        let empty: Vec<_> = rows.iter().filter(|r| r[0] == "0.2" && r[2] == "0.5").collect();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0][3..8], ["0", "", "", "", ""]);
    }

    #[test]
    fn json_round_trip() {
        let r = result();
        let dir = tempfile::tempdir().unwrap();
        let (_, json) = emit_sweep(&r, dir.path()).unwrap();
        assert_eq!(load_sweep_json(&json).unwrap(), r);
    }
}
