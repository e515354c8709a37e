//! Local theory of the Duhamel formulation: the critical Strichartz norm,
//! a Picard solver for the fixed-point map, interval partitioning and
//! blow-up detection.
//!
//! On the torus the X-norm is a surrogate for the space-time norm on `R^d`
//! with the same exponents.

mod blowup;
mod partition;
mod picard;
mod quadrature;
mod xnorm;

pub use blowup::{detect_blowup, BlowupSignal, BlowupSource};
pub use partition::{adaptive_partition, solve_chain, ChainReport, Partition, PartitionOptions};
pub use picard::{picard_solve, DuhamelMap, PicardOptions, PicardReport};
pub use xnorm::{x_norm, x_norm_states, XExponents, XNorm};

use thiserror::Error;

use crate::spectral::SpectralError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LwpError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("X-norm needs dimension at least 3")]
    Dimension,
    #[error("interval [{a}, {b}] is not covered by the path nodes")]
    IntervalOutside { a: f64, b: f64 },
    #[error("interval too long: free evolution X = {free}, forcing X = {forcing}, eta = {eta}")]
    IntervalTooLong { free: f64, forcing: f64, eta: f64 },
    #[error("partition exceeded {cap} intervals by t = {t}; likely blow-up")]
    LikelyBlowup { t: f64, cap: usize },
    #[error("a single step at t = {t} already exceeds eta")]
    StepTooCoarse { t: f64 },
    #[error("non-finite iterate")]
    NonFinite,
    #[error("invalid input: {0}")]
    Invalid(String),
}
