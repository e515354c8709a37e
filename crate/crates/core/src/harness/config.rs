use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::noise::NoiseMultiplier;
use crate::spectral::{FourierGrid, SpectralState};
use crate::wave::{Scheme, SolverConfig};

use super::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

/// Which study a configuration is meant for; the CLI subcommand wins when
/// both are given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    #[default]
    Ensemble,
    ItoCheck,
    Truncation,
    Regularity,
    Lwp,
    Perturbation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub modes: usize,
    /// Dealiasing factor; see [`RunConfig::pad`] for the default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub h: f64,
    pub horizon: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "one")]
    pub save_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    /// Defaults to the energy-critical `1 + 4/(d − 2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "default_threshold")]
    pub blowup_threshold: f64,
}

fn yes() -> bool {
    true
}

fn default_threshold() -> f64 {
    1e6
}

impl Default for EquationSpec {
    fn default() -> Self {
        Self { p: None, nonlinear: true, blowup_threshold: default_threshold() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeValue {
    pub n: Vec<i32>,
    pub value: f64,
}

/// `φ̂_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    #[default]
    Zero,
    /// `⟨n⟩^{−alpha}`, optionally restricted to `|n| ≤ cutoff`.
    PowerDecay {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    Table { modes: Vec<ModeValue> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoeff {
    pub n: Vec<i32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Initial data `(u₀, u₁)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    #[default]
    Zero,
    Modes {
        #[serde(default)]
        u: Vec<ModeCoeff>,
        #[serde(default)]
        ut: Vec<ModeCoeff>,
    },
    /// Periodized Gaussian of peak `amplitude` and standard deviation
    /// `width` centred at the origin, at rest: `û_n = A wᵈ exp(−w²|n|²/2)`.
    Bump { amplitude: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default = "one")]
    pub n_traj: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Worker threads; all cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self { n_traj: 1, base_seed: 0, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    #[serde(default = "default_truncation")]
    pub truncation_modes: Vec<usize>,
    #[serde(default = "default_samples")]
    pub regularity_samples: usize,
    #[serde(default = "default_epsilons")]
    pub perturbation_epsilons: Vec<f64>,
    #[serde(default = "default_eta")]
    pub lwp_eta: f64,
    #[serde(default = "default_tol")]
    pub lwp_tol: f64,
}

fn default_truncation() -> Vec<usize> {
    vec![4, 8, 16]
}

fn default_samples() -> usize {
    100
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1]
}

fn default_eta() -> f64 {
    0.05
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for StudySpec {
    fn default() -> Self {
        Self {
            truncation_modes: default_truncation(),
            regularity_samples: default_samples(),
            perturbation_epsilons: default_epsilons(),
            lwp_eta: default_eta(),
            lwp_tol: default_tol(),
        }
    }
}

/// Complete description of a run, stored as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub grid: GridSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub equation: EquationSpec,
    #[serde(default)]
    pub noise: MultiplierSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub studies: StudySpec,
}

/// Field-level validation failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn fail<T>(field: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { field: field.to_string(), message: message.into() })
}

fn positive(field: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        fail(field, format!("must be positive and finite, got {x}"))
    }
}

impl RunConfig {
    /// Minimal configuration: zero data, no noise, one trajectory.
    pub fn new(dim: usize, modes: usize, h: f64, horizon: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: Experiment::default(),
            output_dir: None,
            grid: GridSpec { dim, modes, pad: None },
            time: TimeSpec { h, horizon, scheme: Scheme::default(), save_every: 1 },
            equation: EquationSpec::default(),
            noise: MultiplierSpec::default(),
            initial: InitialSpec::default(),
            ensemble: EnsembleSpec::default(),
            studies: StudySpec::default(),
        }
    }

    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return fail("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        let g = &self.grid;
        if !(1..=5).contains(&g.dim) {
            return fail("grid.dim", format!("must be between 1 and 5, got {}", g.dim));
        }
        if g.modes == 0 {
            return fail("grid.modes", "must be at least 1");
        }
        if let Some(pad) = g.pad {
            if !(pad >= 1.0 && pad.is_finite()) {
                return fail("grid.pad", format!("must be at least 1, got {pad}"));
            }
        }
        positive("time.h", self.time.h)?;
        positive("time.horizon", self.time.horizon)?;
        if self.time.save_every == 0 {
            return fail("time.save_every", "must be at least 1");
        }
        match self.equation.p {
            Some(p) if !(p >= 1.0 && p.is_finite()) => return fail("equation.p", format!("must be at least 1, got {p}")),
            None if g.dim < 3 => return fail("equation.p", "required when grid.dim < 3"),
            _ => {}
        }
        positive("equation.blowup_threshold", self.equation.blowup_threshold)?;
        match &self.noise {
            MultiplierSpec::Zero => {}
            MultiplierSpec::PowerDecay { alpha, cutoff } => {
                if !alpha.is_finite() {
                    return fail("noise.alpha", "must be finite");
                }
                if let Some(c) = cutoff {
                    positive("noise.cutoff", *c)?;
                }
            }
            MultiplierSpec::Table { modes } => {
                for (i, m) in modes.iter().enumerate() {
                    if m.n.len() != g.dim {
                        return fail(&format!("noise.modes[{i}].n"), format!("needs {} entries", g.dim));
                    }
                    if !(m.value >= 0.0 && m.value.is_finite()) {
                        return fail(&format!("noise.modes[{i}].value"), "must be finite and nonnegative");
                    }
                }
            }
        }
        match &self.initial {
            InitialSpec::Zero => {}
            InitialSpec::Modes { u, ut } => {
                for (name, list) in [("u", u), ("ut", ut)] {
                    for (i, m) in list.iter().enumerate() {
                        let field = format!("initial.{name}[{i}]");
                        if m.n.len() != g.dim {
                            return fail(&format!("{field}.n"), format!("needs {} entries", g.dim));
                        }
                        if m.n.iter().any(|&k| k.unsigned_abs() as usize > g.modes) {
                            return fail(&format!("{field}.n"), "outside the lattice");
                        }
                        if !(m.re.is_finite() && m.im.is_finite()) {
                            return fail(&field, "coefficients must be finite");
                        }
                    }
                }
            }
            InitialSpec::Bump { amplitude, width } => {
                if !amplitude.is_finite() {
                    return fail("initial.amplitude", "must be finite");
                }
                positive("initial.width", *width)?;
            }
        }
        if self.ensemble.n_traj == 0 {
            return fail("ensemble.n_traj", "must be at least 1");
        }
        if self.ensemble.workers == Some(0) {
            return fail("ensemble.workers", "must be at least 1");
        }
        let s = &self.studies;
        if s.truncation_modes.is_empty() || s.truncation_modes.windows(2).any(|w| w[0] >= w[1]) || s.truncation_modes[0] == 0 {
            return fail("studies.truncation_modes", "must be positive and strictly increasing");
        }
        if s.regularity_samples == 0 {
            return fail("studies.regularity_samples", "must be at least 1");
        }
        if s.perturbation_epsilons.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return fail("studies.perturbation_epsilons", "must be finite and nonnegative");
        }
        positive("studies.lwp_eta", s.lwp_eta)?;
        positive("studies.lwp_tol", s.lwp_tol)?;
        Ok(())
    }

    /// Power of the nonlinearity.
    pub fn power(&self) -> f64 {
        self.equation.p.or_else(|| SolverConfig::critical_power(self.grid.dim)).unwrap_or(1.0)
    }

    /// Explicit `grid.pad`, else `⌈(p+1)/2⌉` for integer `p` (exact
    /// dealiasing) and `3/2` otherwise.
    pub fn pad(&self) -> f64 {
        self.grid.pad.unwrap_or_else(|| {
            let p = self.power();
            if p.fract() == 0.0 {
                ((p + 1.0) / 2.0).ceil().max(1.0)
            } else {
                1.5
            }
        })
    }

    pub fn build_grid(&self) -> Result<Arc<FourierGrid>, HarnessError> {
        self.grid_with_modes(self.grid.modes)
    }

    pub fn grid_with_modes(&self, modes: usize) -> Result<Arc<FourierGrid>, HarnessError> {
        Ok(FourierGrid::new(self.grid.dim, modes, self.pad())?)
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        let mut c = SolverConfig::new(self.time.h, self.time.horizon, self.power());
        c.scheme = self.time.scheme;
        c.save_every = self.time.save_every;
        c.nonlinear = self.equation.nonlinear;
        c.blowup_threshold = self.equation.blowup_threshold;
        c
    }

    pub fn multiplier(&self, grid: &Arc<FourierGrid>) -> Result<NoiseMultiplier<f64>, HarnessError> {
        Ok(match &self.noise {
            MultiplierSpec::Zero => NoiseMultiplier::zero(grid),
            MultiplierSpec::PowerDecay { alpha, cutoff } => NoiseMultiplier::power_decay(grid, *alpha, *cutoff),
            MultiplierSpec::Table { modes } => {
                // modes beyond a truncated lattice are projected away
                let inside = |n: &[i32]| n.iter().all(|&k| k.unsigned_abs() as usize <= grid.modes());
                let table: Vec<(Vec<i32>, f64)> =
                    modes.iter().filter(|m| inside(&m.n)).map(|m| (m.n.clone(), m.value)).collect();
                NoiseMultiplier::from_table(grid, &table)?
            }
        })
    }

    pub fn initial_state(&self, grid: &Arc<FourierGrid>) -> Result<SpectralState<f64>, HarnessError> {
        let mut s = SpectralState::zeros(grid);
        match &self.initial {
            InitialSpec::Zero => {}
            InitialSpec::Modes { u, ut } => {
                for m in u {
                    s.u.set_mode(&m.n, Complex::new(m.re, m.im))?;
                }
                for m in ut {
                    s.ut.set_mode(&m.n, Complex::new(m.re, m.im))?;
                }
            }
            InitialSpec::Bump { amplitude, width } => {
                let scale = amplitude * width.powi(grid.dim() as i32);
                for (idx, c) in s.u.coeffs_mut().iter_mut().enumerate() {
                    *c = Complex::new(scale * (-0.5 * width * width * grid.norm_sq(idx) as f64).exp(), 0.0);
                }
            }
        }
        Ok(s)
    }
}
