use std::sync::Arc;

use num_complex::Complex;

use crate::scalar::Real;
use crate::spectral::{FourierGrid, SpectralField, SpectralState};
use crate::wave::{FieldPath, LinearPropagator};

use super::{mode_covariance, NoiseMultiplier, NoiseStream};

/// Exactly sampled stochastic convolution `(Ψ, ∂ₜΨ)` at time `t`, after
/// `step` sampler steps.
#[derive(Debug, Clone)]
pub struct ConvolutionState<T> {
    pub psi: SpectralField<T>,
    pub psit: SpectralField<T>,
    pub t: T,
    pub step: u64,
}

impl<T: Real> ConvolutionState<T> {
    pub fn zeros(grid: &Arc<FourierGrid>) -> Self {
        Self { psi: SpectralField::zeros(grid), psit: SpectralField::zeros(grid), t: T::zero(), step: 0 }
    }

    pub fn to_state(&self) -> SpectralState<T> {
        SpectralState { u: self.psi.clone(), ut: self.psit.clone() }
    }
}

/// Per-mode transition of the stochastic convolution over a fixed step:
/// free rotation of the current value plus an independent Gaussian increment
/// with [`mode_covariance`]. Sampling is exact in time.
#[derive(Debug, Clone)]
pub struct ConvolutionSampler<T> {
    propagator: LinearPropagator<T>,
    /// Cholesky factors for the half lattice `idx ≤ center`.
    factors: Vec<(T, T, T)>,
    keys: Vec<u64>,
}

impl<T: Real> ConvolutionSampler<T> {
    pub fn new(phi: &NoiseMultiplier<T>, h: T) -> Self {
        let grid = phi.grid();
        let half = grid.center() + 1;
        let factors = (0..half)
            .map(|idx| mode_covariance(grid.abs_freq(idx), h, phi.values()[idx]).cholesky())
            .collect();
        let keys = (0..half).map(|idx| grid.freq_key(idx)).collect();
        Self { propagator: LinearPropagator::new(grid, h), factors, keys }
    }

    pub fn h(&self) -> T {
        self.propagator.h()
    }

    /// `Ψ` at `0, h, …, steps·h` starting from zero.
    pub fn path(&self, steps: usize, stream: &mut NoiseStream) -> FieldPath<T> {
        let mut state = ConvolutionState::zeros(self.propagator.grid());
        let mut fields = Vec::with_capacity(steps + 1);
        fields.push(state.psi.clone());
        for _ in 0..steps {
            self.step(&mut state, stream);
            fields.push(state.psi.clone());
        }
        FieldPath::new(T::zero(), self.h(), fields)
    }

    pub fn step(&self, state: &mut ConvolutionState<T>, stream: &mut NoiseStream) {
        self.propagator.apply_pair(&mut state.psi, &mut state.psit);
        let center = self.factors.len() - 1;
        let len = state.psi.coeffs().len();
        let frac = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        for (idx, &(l11, l21, l22)) in self.factors.iter().enumerate() {
            if l11 == T::zero() && l22 == T::zero() {
                continue;
            }
            let g = stream.normals(state.step, self.keys[idx]).map(T::lit);
            let (z1, z2) = if idx == center {
                (Complex::new(g[0], T::zero()), Complex::new(g[2], T::zero()))
            } else {
                (Complex::new(g[0], g[1]).scale(frac), Complex::new(g[2], g[3]).scale(frac))
            };
            let dpsi = z1.scale(l11);
            let dpsit = z1.scale(l21) + z2.scale(l22);
            let j = len - 1 - idx;
            let psi = state.psi.coeffs_mut();
            psi[idx] = psi[idx] + dpsi;
            if j != idx {
                psi[j] = psi[idx].conj();
            }
            let psit = state.psit.coeffs_mut();
            psit[idx] = psit[idx] + dpsit;
            if j != idx {
                psit[j] = psit[idx].conj();
            }
        }
        state.t = state.t + self.h();
        state.step += 1;
    }
}

/// One exact step of length `h`; builds the sampler for a single use.
pub fn step_convolution<T: Real>(
    state: &ConvolutionState<T>,
    phi: &NoiseMultiplier<T>,
    h: T,
    stream: &mut NoiseStream,
) -> ConvolutionState<T> {
    let mut out = state.clone();
    ConvolutionSampler::new(phi, h).step(&mut out, stream);
    out
}
