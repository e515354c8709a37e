use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{ito_drift_check, ito_drift_check_against, DriftFit, EnergyLedger, ItoVerdict};
use crate::noise::NoiseMultiplier;
use crate::wave::{TrajectoryRecord, WaveSolver};

use super::output::{write_json, write_trajectory_csv};
use super::{HarnessError, RunConfig};

/// Wall-clock figures; written apart from the summary so that summaries
/// stay byte-identical between runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Timing {
    pub wall_seconds: f64,
    pub trajectories_per_second: f64,
    pub steps_per_second: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub config: RunConfig,
    pub n_traj: usize,
    /// Trajectories that tripped the blow-up guard.
    pub blown_up: Vec<u64>,
    pub hs_norm_sq: f64,
    pub drift: Option<DriftFit<f64>>,
    /// Drift against `‖φ‖²_HS`.
    pub verdict: Option<ItoVerdict<f64>>,
    /// Drift against `½‖φ‖²_HS`, the Itô correction for `½‖∂ₜu‖²`.
    pub half_drift: Option<ItoVerdict<f64>>,
    pub final_mean_energy: f64,
    /// Ensemble mean of `sup_t E(u)(t)`.
    pub mean_sup_energy: f64,
    #[serde(skip)]
    pub timing: Timing,
}

pub(crate) fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    b.build().map_err(|e| HarnessError::Study(format!("thread pool: {e}")))
}

/// Runs every trajectory of the ensemble; records come back in trajectory
/// order whatever the number of workers.
pub fn simulate_records(cfg: &RunConfig, workers: Option<usize>) -> Result<(Vec<TrajectoryRecord<f64>>, Timing), HarnessError> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let phi = cfg.multiplier(&grid)?;
    let solver = WaveSolver::new(&grid, cfg.solver_config(), &phi)?;
    let data = cfg.initial_state(&grid)?;
    let seed = cfg.ensemble.base_seed;
    let n = cfg.ensemble.n_traj as u64;
    let pool = pool(workers.or(cfg.ensemble.workers))?;
    let start = Instant::now();
    let records = pool.install(|| {
        (0..n).into_par_iter().map(|k| solver.simulate(&data, seed, k)).collect::<Result<Vec<_>, _>>()
    })?;
    let wall = start.elapsed().as_secs_f64().max(1e-9);
    let steps = (cfg.solver_config().steps() * records.len()) as f64;
    let timing = Timing {
        wall_seconds: wall,
        trajectories_per_second: records.len() as f64 / wall,
        steps_per_second: steps / wall,
        workers: pool.current_num_threads(),
    };
    Ok((records, timing))
}

/// Ledger and summary of finished records.
pub fn summarize(
    cfg: &RunConfig,
    records: &[TrajectoryRecord<f64>],
    phi: &NoiseMultiplier<f64>,
    timing: Timing,
) -> Result<(EnsembleSummary, EnergyLedger<f64>), HarnessError> {
    let ledger = EnergyLedger::from_records(records)?;
    let hs = phi.hs_norm(0.0);
    let verdict = ito_drift_check(&ledger, phi).ok();
    let half_drift = ito_drift_check_against(&ledger, 0.5 * hs * hs).ok();
    let sups: Vec<f64> = records.iter().map(|r| r.energy_u.iter().copied().fold(0.0, f64::max)).collect();
    let summary = EnsembleSummary {
        config: cfg.clone(),
        n_traj: records.len(),
        blown_up: records.iter().filter(|r| r.blown_up()).map(|r| r.trajectory).collect(),
        hs_norm_sq: hs * hs,
        drift: ledger.fit,
        verdict,
        half_drift,
        final_mean_energy: ledger.mean.last().copied().unwrap_or(0.0),
        mean_sup_energy: sups.iter().sum::<f64>() / sups.len().max(1) as f64,
        timing,
    };
    Ok((summary, ledger))
}

/// Runs the ensemble and writes `traj_XXXXX.csv`, `ledger.csv`,
/// `verdict.json` (with at least two complete trajectories),
/// `summary.json`, `timing.json` and `config.toml` into `out`.
pub fn run_ensemble(cfg: &RunConfig, out: &Path) -> Result<EnsembleSummary, HarnessError> {
    let (records, timing) = simulate_records(cfg, None)?;
    let phi = cfg.multiplier(&cfg.build_grid()?)?;
    let (summary, ledger) = summarize(cfg, &records, &phi, timing)?;
    fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    for r in &records {
        write_trajectory_csv(&out.join(format!("traj_{:05}.csv", r.trajectory)), r)?;
    }
    let path = out.join("ledger.csv");
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    ledger.write_csv(std::io::BufWriter::new(file)).map_err(|e| HarnessError::io(&path, e))?;
    if let Some(v) = &summary.verdict {
        write_json(&out.join("verdict.json"), v)?;
    }
    write_json(&out.join("summary.json"), &summary)?;
    write_json(&out.join("timing.json"), &summary.timing)?;
    let path = out.join("config.toml");
    fs::write(&path, cfg.to_toml_string()).map_err(|e| HarnessError::io(&path, e))?;
    Ok(summary)
}
