use std::io::{self, Write};

use serde::Serialize;

use crate::noise::NoiseMultiplier;
use crate::scalar::Real;
use crate::stats::{linear_fit, mean_stderr};
use crate::wave::TrajectoryRecord;

use super::EnergyError;

/// Fraction of the horizon skipped before the drift regression.
pub const DRIFT_WINDOW: f64 = 0.1;

/// Drift of the mean energy from per-trajectory least-squares slopes; the
/// spread of those slopes gives the standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftFit<T> {
    pub slope: T,
    pub stderr: T,
    /// First time used in the regression.
    pub window_start: T,
    pub n_traj: usize,
}

impl<T: Real> DriftFit<T> {
    /// `slope ± z·stderr`.
    pub fn interval(&self, z: T) -> (T, T) {
        (self.slope - z * self.stderr, self.slope + z * self.stderr)
    }
}

/// Ensemble of `E(u)(t)` series aligned on common save times.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger<T> {
    pub times: Vec<T>,
    /// Trajectory indices in ascending order.
    pub trajectories: Vec<u64>,
    /// One series per trajectory; blown-up runs are shorter.
    pub energies: Vec<Vec<T>>,
    pub mean: Vec<T>,
    pub stderr: Vec<T>,
    /// Trajectories alive at each time.
    pub counts: Vec<usize>,
    /// `None` with fewer than two complete trajectories.
    pub fit: Option<DriftFit<T>>,
}

impl<T: Real> EnergyLedger<T> {
    pub fn from_records(records: &[TrajectoryRecord<T>]) -> Result<Self, EnergyError> {
        let mut sorted: Vec<&TrajectoryRecord<T>> = records.iter().collect();
        sorted.sort_by_key(|r| r.trajectory);
        let longest = sorted.iter().max_by_key(|r| r.len()).ok_or(EnergyError::TooFewTrajectories { got: 0 })?;
        let times = longest.times.clone();
        for r in &sorted {
            let tol = T::lit(1e-9) * (T::one() + times.last().copied().unwrap_or(T::zero()).abs());
            if r.times.iter().zip(&times).any(|(a, b)| (*a - *b).abs() > tol) {
                return Err(EnergyError::Mismatch(format!("trajectory {} has different save times", r.trajectory)));
            }
        }
        let mut mean = Vec::with_capacity(times.len());
        let mut stderr = Vec::with_capacity(times.len());
        let mut counts = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let column: Vec<T> = sorted.iter().filter_map(|r| r.energy_u.get(k).copied()).collect();
            let (m, s) = mean_stderr(&column);
            mean.push(m);
            stderr.push(s);
            counts.push(column.len());
        }
        let complete: Vec<&&TrajectoryRecord<T>> = sorted.iter().filter(|r| r.len() == times.len() && !r.blown_up()).collect();
        let fit = if complete.len() >= 2 && times.len() >= 2 {
            let start = T::lit(DRIFT_WINDOW) * *times.last().expect("nonempty");
            let first = times.iter().position(|&t| t >= start).unwrap_or(0);
            let x = &times[first..];
            let slopes: Option<Vec<T>> =
                complete.iter().map(|r| linear_fit(x, &r.energy_u[first..]).map(|f| f.slope)).collect();
            slopes.map(|s| {
                let (slope, se) = mean_stderr(&s);
                DriftFit { slope, stderr: se, window_start: times[first], n_traj: s.len() }
            })
        } else {
            None
        };
        Ok(Self {
            times,
            trajectories: sorted.iter().map(|r| r.trajectory).collect(),
            energies: sorted.iter().map(|r| r.energy_u.clone()).collect(),
            mean,
            stderr,
            counts,
            fit,
        })
    }

    /// CSV with columns `t, mean_E, stderr_E, n_traj`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,mean_E,stderr_E,n_traj")?;
        for k in 0..self.times.len() {
            writeln!(w, "{},{},{},{}", self.times[k], self.mean[k], self.stderr[k], self.counts[k])?;
        }
        Ok(())
    }
}

/// Outcome of comparing the fitted drift with a target slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ItoVerdict<T> {
    pub slope: T,
    pub target: T,
    pub stderr: T,
    pub z: T,
    pub pass: bool,
}

/// Absolute slope tolerance used when the ensemble has no spread.
const EXACT_TOL: f64 = 1e-6;

/// Compares the drift of the mean energy with `‖φ‖²_HS`.
pub fn ito_drift_check<T: Real>(ledger: &EnergyLedger<T>, phi: &NoiseMultiplier<T>) -> Result<ItoVerdict<T>, EnergyError> {
    let hs = phi.hs_norm(T::zero());
    ito_drift_check_against(ledger, hs * hs)
}

/// Compares the drift of the mean energy with `target`; passes when
/// `|z| ≤ 3`. Without spread between trajectories (deterministic runs) the
/// slope must match to an absolute `1e−6`.
pub fn ito_drift_check_against<T: Real>(ledger: &EnergyLedger<T>, target: T) -> Result<ItoVerdict<T>, EnergyError> {
    let fit = ledger.fit.ok_or(EnergyError::TooFewTrajectories {
        got: ledger.energies.iter().filter(|e| e.len() == ledger.times.len()).count(),
    })?;
    if ledger.mean.windows(2).all(|w| w[0] == w[1]) {
        return Err(EnergyError::Degenerate);
    }
    let diff = fit.slope - target;
    let z = if fit.stderr > T::zero() {
        diff / fit.stderr
    } else if diff.abs() <= T::lit(EXACT_TOL) {
        T::zero()
    } else {
        diff.signum() * T::infinity()
    };
    Ok(ItoVerdict { slope: fit.slope, target, stderr: fit.stderr, z, pass: z.abs() <= T::lit(3.0) })
}
