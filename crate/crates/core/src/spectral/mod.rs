//! Periodic spectral discretization: grids, real-field transforms, Sobolev
//! norms and the dealiased power nonlinearity.

mod field;
mod grid;
mod transform;

pub use field::{SpectralField, SpectralState};
pub use grid::{FourierGrid, Freq, MAX_DIM};
pub use transform::{dealias_pad, PointwiseStats, SpectralTransform};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different lattices")]
    GridMismatch,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("frequency {0:?} outside the lattice")]
    OutsideLattice(Vec<i32>),
    #[error("field is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },
    #[error("non-finite value on the collocation grid")]
    NonFinite,
}
