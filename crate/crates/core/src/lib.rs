//! Pseudospectral simulation of the defocusing energy-critical stochastic
//! nonlinear wave equation
//!
//! ```text
//! ∂ₜ²u − Δu + |u|^{4/(d−2)} u = φξ        on T^d = (R/2πZ)^d
//! ```
//!
//! together with the diagnostics used to check its mild formulation: exact
//! sampling of the stochastic convolution, a Picard solver for the Duhamel
//! map, the critical Strichartz norm, Itô energy balance, Galerkin truncation
//! and perturbation studies.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the scalar for the common cases. The
//! [`harness`] layer (configuration, ensembles, file output) is `f64` only.
//!
//! Conventions: integer frequencies, basis `e^{in·x}/(2π)^{d/2}` so Fourier
//! ℓ² coincides with L², and `⟨n⟩ = (1 + |n|²)^{1/2}`.

pub mod energy;
pub mod harness;
pub mod lwp;
pub mod noise;
mod scalar;
pub mod stats;
pub mod spectral;
pub mod wave;

pub use num_complex::Complex;
pub use scalar::{torus_volume, Real};

pub use energy::{energy, ito_drift_check, EnergyLedger, EnergyParts, ItoVerdict};
pub use lwp::{detect_blowup, picard_solve, x_norm, PicardOptions, PicardReport, XExponents, XNorm};
pub use noise::{mode_covariance, ConvolutionState, NoiseMultiplier, NoiseStream};
pub use spectral::{FourierGrid, SpectralError, SpectralField, SpectralState, SpectralTransform};
pub use wave::{linear_propagate, Scheme, SolverConfig, TrajectoryRecord, WaveSolver};


pub type Field = SpectralField<f64>;
pub type Field32 = SpectralField<f32>;
pub type State = SpectralState<f64>;
pub type State32 = SpectralState<f32>;
pub type Transform = SpectralTransform<f64>;
pub type Transform32 = SpectralTransform<f32>;
pub type Multiplier = NoiseMultiplier<f64>;
pub type Multiplier32 = NoiseMultiplier<f32>;
pub type Convolution = ConvolutionState<f64>;
pub type Solver = WaveSolver<f64>;
pub type Solver32 = WaveSolver<f32>;
pub type Record = TrajectoryRecord<f64>;
