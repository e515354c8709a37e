use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{perturbation_scaling, PerturbationFit};
use crate::lwp::{x_norm, DuhamelMap, PicardOptions, PicardReport};
use crate::noise::{ConvolutionSampler, NoiseStream};
use crate::spectral::{FourierGrid, SpectralField, SpectralState};
use crate::stats::{linear_fit, LinearFit};
use crate::wave::{FieldPath, StatePath, WaveSolver};

use super::{HarnessError, MultiplierSpec, RunConfig};

/// Differences between the Galerkin solutions at consecutive cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationRow {
    pub trajectory: u64,
    pub coarse: usize,
    pub fine: usize,
    /// `‖(u_coarse − u_fine)(T)‖_{Ḣ¹×L²}`
    pub energy_diff: f64,
    /// X-norm of `u_coarse − u_fine` over the saved times; `None` below
    /// dimension 3.
    pub x_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationStudy {
    pub modes: Vec<usize>,
    pub rows: Vec<TruncationRow>,
    pub trajectories: usize,
    /// Trajectories whose energy differences strictly decrease.
    pub decreasing: usize,
    /// Mean log-log slope of the energy difference against the coarse cutoff.
    pub rate: Option<f64>,
}

impl TruncationStudy {
    pub fn decreasing_fraction(&self) -> f64 {
        self.decreasing as f64 / self.trajectories.max(1) as f64
    }
}

/// Runs every trajectory at each cutoff in `modes` with the noise coupled
/// across cutoffs (shared Brownian increments per frequency) and compares
/// consecutive cutoffs on the finer lattice.
pub fn truncation_study(cfg: &RunConfig, modes: &[usize]) -> Result<TruncationStudy, HarnessError> {
    cfg.validate()?;
    if modes.len() < 2 || modes.windows(2).any(|w| w[0] >= w[1]) || modes[0] == 0 {
        return Err(HarnessError::Study("truncation cutoffs must be positive and strictly increasing".into()));
    }
    let mut sc = cfg.solver_config();
    sc.keep_states = true;
    let steps = sc.steps();
    if steps % sc.save_every != 0 {
        return Err(HarnessError::Study("time.save_every must divide the number of steps".into()));
    }
    let grids = modes.iter().map(|&m| cfg.grid_with_modes(m)).collect::<Result<Vec<_>, _>>()?;
    let finest = grids.last().expect("nonempty");
    let data = cfg.initial_state(finest)?;
    let solvers = grids
        .iter()
        .map(|g| Ok(WaveSolver::new(g, sc.clone(), &cfg.multiplier(g)?)?))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let seed = cfg.ensemble.base_seed;
    let dt = sc.h * sc.save_every as f64;
    let run = |k: u64| -> Result<Vec<TruncationRow>, HarnessError> {
        let mut finals: Vec<Vec<SpectralState<f64>>> = Vec::new();
        for (g, solver) in grids.iter().zip(&solvers) {
            let r = solver.simulate(&data.resampled(g)?, seed, k)?;
            if let Some(t) = r.blow_up {
                return Err(HarnessError::BlowUp { trajectory: k, t });
            }
            finals.push(r.states);
        }
        let mut rows = Vec::new();
        for i in 0..grids.len() - 1 {
            let fine = &grids[i + 1];
            let diffs = finals[i]
                .iter()
                .zip(&finals[i + 1])
                .map(|(a, b)| Ok(a.resampled(fine)?.sub(b)))
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let last = diffs.last().expect("saved at the horizon");
            let x_diff = if fine.dim() >= 3 {
                let path = FieldPath::new(0.0, dt, diffs.iter().map(|d| d.u.clone()).collect());
                let transform = solvers[i + 1].transform();
                Some(x_norm(transform, &path, 0.0, path.end())?.value)
            } else {
                None
            };
            rows.push(TruncationRow {
                trajectory: k,
                coarse: modes[i],
                fine: modes[i + 1],
                energy_diff: last.energy_norm(),
                x_diff,
            });
        }
        Ok(rows)
    };
    let per_traj = super::ensemble::pool(cfg.ensemble.workers)?
        .install(|| (0..cfg.ensemble.n_traj as u64).into_par_iter().map(run).collect::<Result<Vec<_>, _>>())?;
    let decreasing = per_traj.iter().filter(|rows| rows.windows(2).all(|w| w[1].energy_diff < w[0].energy_diff)).count();
    let slopes: Vec<f64> = per_traj
        .iter()
        .filter_map(|rows| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.energy_diff > 0.0)
                .map(|r| ((r.coarse as f64).ln(), r.energy_diff.ln()))
                .unzip();
            linear_fit(&x, &y).map(|f| f.slope)
        })
        .collect();
    let rate = (!slopes.is_empty()).then(|| slopes.iter().sum::<f64>() / slopes.len() as f64);
    Ok(TruncationStudy {
        modes: modes.to_vec(),
        trajectories: per_traj.len(),
        rows: per_traj.into_iter().flatten().collect(),
        decreasing,
        rate,
    })
}

/// Dyadic frequency shell `lo ≤ |n| < hi` inside the ball `|n| ≤ M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shell {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Mean of `log⟨n⟩` over the shell.
    pub log_japanese: f64,
    /// `log` of the sample and shell mean of `|Ψ̂_n(T)|²`.
    pub log_psi: f64,
    /// Same for `∂ₜΨ̂_n(T)`.
    pub log_psit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityStudy {
    pub alpha: f64,
    pub samples: usize,
    pub shells: Vec<Shell>,
    pub psi: LinearFit<f64>,
    pub psit: LinearFit<f64>,
    /// `−2α − 2`
    pub psi_target: f64,
    /// `−2α`
    pub psit_target: f64,
}

impl RegularityStudy {
    /// `slope ± 2·stderr` for `Ψ` and `∂ₜΨ`.
    pub fn intervals(&self) -> [(f64, f64); 2] {
        let ci = |f: &LinearFit<f64>| (f.slope - 2.0 * f.slope_stderr, f.slope + 2.0 * f.slope_stderr);
        [ci(&self.psi), ci(&self.psit)]
    }
}

const MIN_REGULARITY_MODES: usize = 8;

/// Shell-averaged spectra of `Ψ(T)` and `∂ₜΨ(T)` from independent exact
/// samples, each drawn in one step of length `T`.
pub fn regularity_study(cfg: &RunConfig) -> Result<RegularityStudy, HarnessError> {
    cfg.validate()?;
    let alpha = match cfg.noise {
        MultiplierSpec::PowerDecay { alpha, .. } => alpha,
        _ => return Err(HarnessError::Study("regularity study needs a power_decay multiplier".into())),
    };
    let modes = cfg.grid.modes;
    if modes < MIN_REGULARITY_MODES {
        return Err(HarnessError::Study(format!("too few shells: grid.modes = {modes}, at least {MIN_REGULARITY_MODES} needed")));
    }
    let grid = cfg.build_grid()?;
    let phi = cfg.multiplier(&grid)?;
    let sampler = ConvolutionSampler::new(&phi, cfg.time.horizon);
    let samples = cfg.studies.regularity_samples;
    let nshells = (modes as f64).log2().floor() as usize + 1;
    let shell_of = |idx: usize| -> Option<usize> {
        let k = grid.abs_freq::<f64>(idx);
        (k >= 1.0 && k <= modes as f64).then(|| (k.log2().floor() as usize).min(nshells - 1))
    };
    let mut psi = vec![0.0; nshells];
    let mut psit = vec![0.0; nshells];
    let mut count = vec![0usize; nshells];
    let mut logj = vec![0.0; nshells];
    for idx in 0..grid.len() {
        if let Some(s) = shell_of(idx) {
            count[s] += 1;
            logj[s] += grid.japanese::<f64>(idx).ln();
        }
    }
    for k in 0..samples as u64 {
        let path = {
            let mut stream = NoiseStream::new(cfg.ensemble.base_seed, k);
            let mut st = crate::noise::ConvolutionState::zeros(&grid);
            sampler.step(&mut st, &mut stream);
            st
        };
        for idx in 0..grid.len() {
            if let Some(s) = shell_of(idx) {
                psi[s] += path.psi.coeffs()[idx].norm_sqr();
                psit[s] += path.psit.coeffs()[idx].norm_sqr();
            }
        }
    }
    let shells: Vec<Shell> = (0..nshells)
        .filter(|&s| count[s] > 0)
        .map(|s| {
            let n = (count[s] * samples) as f64;
            Shell {
                lo: 2f64.powi(s as i32),
                hi: 2f64.powi(s as i32 + 1),
                count: count[s],
                log_japanese: logj[s] / count[s] as f64,
                log_psi: (psi[s] / n).ln(),
                log_psit: (psit[s] / n).ln(),
            }
        })
        .collect();
    let x: Vec<f64> = shells.iter().map(|s| s.log_japanese).collect();
    let fit = |y: Vec<f64>| linear_fit(&x, &y).ok_or_else(|| HarnessError::Study("degenerate shell fit".into()));
    Ok(RegularityStudy {
        alpha,
        samples,
        psi: fit(shells.iter().map(|s| s.log_psi).collect())?,
        psit: fit(shells.iter().map(|s| s.log_psit).collect())?,
        shells,
        psi_target: -2.0 * alpha - 2.0,
        psit_target: -2.0 * alpha,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LwpStudy {
    /// Iteration started from the free evolution.
    pub report: PicardReport<f64>,
    /// Iteration started from the zero path.
    pub alternate: PicardReport<f64>,
    /// X-norm of the difference between the two fixed points.
    pub difference: f64,
}

fn noise_path(cfg: &RunConfig, grid: &Arc<FourierGrid>, steps: usize) -> Result<Option<FieldPath<f64>>, HarnessError> {
    let phi = cfg.multiplier(grid)?;
    Ok((!phi.is_zero()).then(|| {
        ConvolutionSampler::new(&phi, cfg.time.h).path(steps, &mut NoiseStream::new(cfg.ensemble.base_seed, 0))
    }))
}

/// Picard iteration for the shifted equation on `[0, steps·h]` from two
/// initial iterates, with `Ψ` from trajectory 0.
pub fn lwp_study(cfg: &RunConfig) -> Result<LwpStudy, HarnessError> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let steps = cfg.solver_config().steps();
    let b = steps as f64 * cfg.time.h;
    let data = cfg.initial_state(&grid)?;
    let psi = noise_path(cfg, &grid, steps)?;
    let map = DuhamelMap::new(&grid, cfg.time.h, cfg.power())?;
    let opts = PicardOptions { eta: cfg.studies.lwp_eta, tol: cfg.studies.lwp_tol, ..PicardOptions::default() };
    let (first, report) = map.solve(&data, psi.as_ref(), 0.0, b, &opts)?;
    let zero = StatePath::new(0.0, cfg.time.h, vec![SpectralState::zeros(&grid); steps + 1]);
    let opts = PicardOptions { initial: Some(zero), ..opts };
    let (second, alternate) = map.solve(&data, psi.as_ref(), 0.0, b, &opts)?;
    let difference = x_norm(map.transform(), &first.sub(&second).positions(), 0.0, b)?.value;
    Ok(LwpStudy { report, alternate, difference })
}

/// `f₀(t) = cos x₁·√2 + (½ + t)·√2 sin x_d` in the orthonormal basis, i.e.
/// unit coefficients on `±e₁` and `∓i(½ + t)` on `±e_d`.
pub fn smooth_forcing(grid: &Arc<FourierGrid>, h: f64, steps: usize) -> FieldPath<f64> {
    let d = grid.dim();
    let (mut e1, mut ed) = (vec![0; d], vec![0; d]);
    e1[0] = 1;
    ed[d - 1] = 1;
    let fields = (0..=steps)
        .map(|k| {
            let mut f = SpectralField::zeros(grid);
            f.set_mode(&e1, Complex::new(1.0, 0.0)).expect("unit mode on the lattice");
            let g = f.coeff(&ed).unwrap_or_default();
            f.set_mode(&ed, g + Complex::new(0.0, -(0.5 + k as f64 * h))).expect("unit mode on the lattice");
            f
        })
        .collect();
    FieldPath::new(0.0, h, fields)
}

/// Distance between the solutions with and without the source `ε f₀`
/// (normalized in `L¹L²`) over `[0, T]`, with `Ψ` from trajectory 0 as the
/// shift.
pub fn perturbation_study(cfg: &RunConfig) -> Result<PerturbationFit<f64>, HarnessError> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let sc = cfg.solver_config();
    let steps = sc.steps();
    let solver = WaveSolver::deterministic(&grid, sc)?;
    let psi = noise_path(cfg, &grid, steps)?;
    let f0 = smooth_forcing(&grid, cfg.time.h, steps);
    let data = cfg.initial_state(&grid)?;
    Ok(perturbation_scaling(&solver, &data, psi.as_ref(), &f0, &cfg.studies.perturbation_epsilons)?)
}
