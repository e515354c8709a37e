//! Configuration files, seeded ensembles, the truncation / regularity /
//! local-solver / perturbation studies and their file output. Everything
//! here runs in `f64`.

mod config;
mod ensemble;
mod output;
mod studies;

pub use config::{
    ConfigError, EnsembleSpec, EquationSpec, Experiment, GridSpec, InitialSpec, ModeCoeff, ModeValue, MultiplierSpec, RunConfig,
    StudySpec, TimeSpec, SCHEMA_VERSION,
};
pub use ensemble::{run_ensemble, simulate_records, summarize, EnsembleSummary, Timing};
pub use output::{resolve_output_dir, write_json, write_report, write_trajectory_csv, Report, OUT_DIR_ENV};
pub use studies::{
    lwp_study, perturbation_study, regularity_study, smooth_forcing, truncation_study, LwpStudy, RegularityStudy, Shell,
    TruncationRow, TruncationStudy,
};

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::energy::EnergyError;
use crate::lwp::LwpError;
use crate::noise::NoiseError;
use crate::spectral::SpectralError;
use crate::wave::SolverError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Lwp(#[from] LwpError),
    #[error("trajectory {trajectory} blew up at t = {t}")]
    BlowUp { trajectory: u64, t: f64 },
    #[error("{0}")]
    Study(String),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}
