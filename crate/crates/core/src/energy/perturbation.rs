use serde::Serialize;

use crate::scalar::Real;
use crate::spectral::SpectralState;
use crate::stats::linear_fit;
use crate::wave::{FieldPath, SolverError, WaveSolver};

use super::EnergyError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationFit<T> {
    pub epsilons: Vec<T>,
    /// `sup_t ‖(v_ε − v)(t)‖_{Ḣ¹×L²}` for each `ε`.
    pub distances: Vec<T>,
    /// Log-log slope over the positive pairs; `None` with fewer than two.
    pub slope: Option<T>,
}

/// Solves the shifted equation with and without the source `ε f`, where
/// `f = f₀ / ‖f₀‖_{L¹L²}`, over the nodes of `f₀`, and fits the distance
/// between the solutions against `ε` on log-log axes.
pub fn perturbation_scaling<T: Real>(
    solver: &WaveSolver<T>,
    data: &SpectralState<T>,
    shift: Option<&FieldPath<T>>,
    f0: &FieldPath<T>,
    epsilons: &[T],
) -> Result<PerturbationFit<T>, EnergyError> {
    if f0.len() < 2 {
        return Err(EnergyError::Invalid("source needs at least two nodes".into()));
    }
    let steps = f0.len() - 1;
    let l1l2 = f0
        .fields
        .windows(2)
        .fold(T::zero(), |a, w| a + T::lit(0.5) * f0.h * (w[0].l2_norm() + w[1].l2_norm()));
    if !(l1l2 > T::zero()) {
        return Err(EnergyError::Invalid("source has zero L¹L² norm".into()));
    }
    let f = FieldPath::new(f0.t0, f0.h, f0.fields.iter().map(|x| x.scaled(T::one() / l1l2)).collect());
    let run = |source: Option<(&FieldPath<T>, T)>| match solver.run_path(data, shift, source, steps) {
        Err(SolverError::BlowUp { t }) => Err(EnergyError::BlownUp { t }),
        other => other.map_err(EnergyError::from),
    };
    let base = run(None)?;
    let mut distances = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let path = run(Some((&f, eps)))?;
        let d = path.iter().zip(&base).fold(T::zero(), |a, (x, y)| a.max(x.sub(y).energy_norm()));
        distances.push(d);
    }
    let (lx, ly): (Vec<T>, Vec<T>) = epsilons
        .iter()
        .zip(&distances)
        .filter(|(e, d)| **e > T::zero() && **d > T::zero())
        .map(|(e, d)| (e.ln(), d.ln()))
        .unzip();
    let slope = linear_fit(&lx, &ly).map(|fit| fit.slope);
    Ok(PerturbationFit { epsilons: epsilons.to_vec(), distances, slope })
}
