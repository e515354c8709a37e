use crate::scalar::Real;
use crate::spectral::{SpectralError, SpectralState, SpectralTransform};

/// Energy split into its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts<T> {
    /// `½‖∂ₜu‖²`
    pub kinetic: T,
    /// `½‖∇u‖²`
    pub gradient: T,
    /// `∫|u|^{p+1}/(p+1)`
    pub potential: T,
}

impl<T: Real> EnergyParts<T> {
    pub fn total(&self) -> T {
        self.kinetic + self.gradient + self.potential
    }
}

/// `E(u, ∂ₜu) = ½‖∂ₜu‖² + ½‖∇u‖² + ∫|u|^{p+1}/(p+1)`; for the critical power
/// the last coefficient is `(d−2)/(2d)`.
///
/// Kinetic and gradient terms come from the coefficients; the potential is
/// the collocation quadrature on the same padded grid as the nonlinearity.
pub fn energy<T: Real>(transform: &SpectralTransform<T>, state: &SpectralState<T>, p: T) -> Result<T, SpectralError> {
    energy_parts(transform, state, p).map(|e| e.total())
}

pub fn energy_parts<T: Real>(
    transform: &SpectralTransform<T>,
    state: &SpectralState<T>,
    p: T,
) -> Result<EnergyParts<T>, SpectralError> {
    let stats = transform.pointwise_stats(&state.u, p, None)?;
    Ok(parts(state, stats.potential, p))
}

fn parts<T: Real>(state: &SpectralState<T>, potential_integral: T, p: T) -> EnergyParts<T> {
    let half = T::lit(0.5);
    EnergyParts {
        kinetic: half * state.ut.l2_norm().powi(2),
        gradient: half * state.u.gradient_sq(),
        potential: potential_integral / (p + T::one()),
    }
}

/// Energy when `∫|u|^{p+1}` is already known.
pub(crate) fn energy_from_potential<T: Real>(state: &SpectralState<T>, potential_integral: T, p: T) -> T {
    parts(state, potential_integral, p).total()
}
