//! The noise multiplier `φ`, Hilbert–Schmidt norms and exact sampling of the
//! stochastic convolution `Ψ(t) = ∫₀ᵗ S(t − t′) φ dW(t′)` mode by mode.
//!
//! Each complex mode is driven by `β_n` with `β_{−n} = conj β_n` and
//! `E|β_n(t)|² = t`, the orthonormal-exponential realization of a real
//! cylindrical Wiener process.

mod covariance;
mod multiplier;
mod rng;
mod sampler;

pub use covariance::{mode_covariance, ModeCovariance};
pub use multiplier::NoiseMultiplier;
pub use rng::NoiseStream;
pub use sampler::{step_convolution, ConvolutionSampler, ConvolutionState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("frequency {0:?} outside the lattice")]
    OutsideLattice(Vec<i32>),
    #[error("multiplier value at {0:?} must be finite and nonnegative")]
    InvalidValue(Vec<i32>),
    #[error("multiplier table gives different values at {0:?} and its negative")]
    Asymmetric(Vec<i32>),
}
