//! Time integration of the shifted equation `∂ₜ²v − Δv + N(v + Ψ) = 0`
//! coupled to the exactly sampled convolution `Ψ`.

mod path;
mod propagator;
mod record;
mod solver;

pub use path::{FieldPath, StatePath};
pub use propagator::{linear_propagate, LinearPropagator};
pub use record::TrajectoryRecord;
pub use solver::{Scheme, SolverConfig, WaveSolver};

use thiserror::Error;

use crate::spectral::SpectralError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("state and solver live on different lattices")]
    GridMismatch,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("blow-up guard tripped at t = {t}")]
    BlowUp { t: f64 },
    #[error("path has {got} nodes, {needed} needed")]
    PathTooShort { needed: usize, got: usize },
}
