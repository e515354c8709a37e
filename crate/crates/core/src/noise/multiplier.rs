use std::sync::Arc;

use crate::scalar::Real;
use crate::spectral::FourierGrid;

use super::NoiseError;

/// Real, even Fourier multiplier `φ e^{in·x} = φ̂_n e^{in·x}` restricted to a
/// lattice.
#[derive(Debug, Clone)]
pub struct NoiseMultiplier<T> {
    grid: Arc<FourierGrid>,
    phi_hat: Vec<T>,
}

impl<T: Real> NoiseMultiplier<T> {
    pub fn zero(grid: &Arc<FourierGrid>) -> Self {
        Self { grid: grid.clone(), phi_hat: vec![T::zero(); grid.len()] }
    }

    /// `φ̂_n = ⟨n⟩^{−α}` for `|n| ≤ cutoff` (all lattice modes when `None`).
    pub fn power_decay(grid: &Arc<FourierGrid>, alpha: T, cutoff: Option<T>) -> Self {
        let phi_hat = (0..grid.len())
            .map(|idx| {
                let inside = cutoff.is_none_or(|c| grid.abs_freq::<T>(idx) <= c);
                if inside {
                    grid.japanese::<T>(idx).powf(-alpha)
                } else {
                    T::zero()
                }
            })
            .collect();
        Self { grid: grid.clone(), phi_hat }
    }

    /// Multiplier from `(n, φ̂_n)` pairs; `−n` receives the same value and
    /// unlisted modes are zero.
    pub fn from_table(grid: &Arc<FourierGrid>, table: &[(Vec<i32>, T)]) -> Result<Self, NoiseError> {
        let mut phi_hat = vec![T::zero(); grid.len()];
        let mut set = vec![false; grid.len()];
        for (n, v) in table {
            let idx = grid.index_of(n).ok_or_else(|| NoiseError::OutsideLattice(n.clone()))?;
            if !(v.is_finite() && *v >= T::zero()) {
                return Err(NoiseError::InvalidValue(n.clone()));
            }
            for j in [idx, grid.conj_index(idx)] {
                if set[j] && phi_hat[j] != *v {
                    return Err(NoiseError::Asymmetric(n.clone()));
                }
                phi_hat[j] = *v;
                set[j] = true;
            }
        }
        Ok(Self { grid: grid.clone(), phi_hat })
    }

    pub fn single_mode(grid: &Arc<FourierGrid>, n: &[i32], value: T) -> Result<Self, NoiseError> {
        Self::from_table(grid, &[(n.to_vec(), value)])
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.phi_hat
    }

    pub fn value(&self, n: &[i32]) -> Option<T> {
        self.grid.index_of(n).map(|i| self.phi_hat[i])
    }

    pub fn is_zero(&self) -> bool {
        self.phi_hat.iter().all(|v| *v == T::zero())
    }

    /// `‖φ‖_{HS(L², H^s)} = (Σ_n ⟨n⟩^{2s} φ̂_n²)^{1/2}` over the lattice.
    pub fn hs_norm(&self, s: T) -> T {
        self.phi_hat
            .iter()
            .enumerate()
            .map(|(i, v)| (T::one() + T::lit(self.grid.norm_sq(i) as f64)).powf(s) * *v * *v)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }
}
