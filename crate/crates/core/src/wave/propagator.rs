use std::sync::Arc;

use crate::scalar::Real;
use crate::spectral::{FourierGrid, SpectralField, SpectralState};

/// Exact free wave flow over a fixed time `h`, one rotation per mode:
///
/// ```text
/// û  ← cos(h|n|) û + sin(h|n|)/|n| ∂ₜû
/// ∂ₜû ← −|n| sin(h|n|) û + cos(h|n|) ∂ₜû
/// ```
///
/// At `n = 0` this is `(û + h ∂ₜû, ∂ₜû)`.
#[derive(Debug, Clone)]
pub struct LinearPropagator<T> {
    grid: Arc<FourierGrid>,
    h: T,
    cos: Vec<T>,
    sinc: Vec<T>,
    ksin: Vec<T>,
}

impl<T: Real> LinearPropagator<T> {
    pub fn new(grid: &Arc<FourierGrid>, h: T) -> Self {
        let n = grid.len();
        let (mut cos, mut sinc, mut ksin) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for idx in 0..n {
            let k: T = grid.abs_freq(idx);
            let (s, c) = (h * k).sin_cos();
            cos.push(c);
            sinc.push(if k == T::zero() { h } else { s / k });
            ksin.push(k * s);
        }
        Self { grid: grid.clone(), h, cos, sinc, ksin }
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn apply(&self, state: &mut SpectralState<T>) {
        self.apply_pair(&mut state.u, &mut state.ut);
    }

    pub fn apply_pair(&self, u: &mut SpectralField<T>, ut: &mut SpectralField<T>) {
        debug_assert!(u.grid().same_lattice(&self.grid));
        let (us, uts) = (u.coeffs_mut(), ut.coeffs_mut());
        for idx in 0..us.len() {
            let (a, b) = (us[idx], uts[idx]);
            us[idx] = a.scale(self.cos[idx]) + b.scale(self.sinc[idx]);
            uts[idx] = b.scale(self.cos[idx]) - a.scale(self.ksin[idx]);
        }
    }
}

/// Free evolution of `state` by time `h` (any sign).
pub fn linear_propagate<T: Real>(state: &SpectralState<T>, h: T) -> SpectralState<T> {
    let mut out = state.clone();
    LinearPropagator::new(state.grid(), h).apply(&mut out);
    out
}
