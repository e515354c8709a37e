use crate::scalar::Real;
use crate::wave::TrajectoryRecord;

/// Largest admissible growth rate per unit time.
pub const GRONWALL_C2_CAP: f64 = 50.0;

/// Envelope `E(v)(t) ≤ C₁ e^{C₂ t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallFit<T> {
    pub c1: T,
    pub c2: T,
    /// Smallest `κ` with `1 + E(t_k) ≤ (1 + E(0)) exp(κ ∫₀^{t_k} ζ)` at all
    /// saved times.
    pub kappa: T,
    pub violated: bool,
}

impl<T: Real> GronwallFit<T> {
    pub fn envelope(&self, t: T) -> T {
        self.c1 * (self.c2 * t).exp()
    }
}

/// Relative energy growth below this is treated as none.
const FLAT: f64 = 1e-6;

/// Fits the Gronwall envelope of `E(v)` from the record given the sizes
/// `ζ(t_k)` of the shift (e.g. `sup |Ψ|`), with `C₂ = κ · max ζ` and `C₁`
/// the smallest constant for which the envelope dominates the series.
/// Blown-up records and rates above the cap are reported as violated.
pub fn gronwall_envelope<T: Real>(record: &TrajectoryRecord<T>, z_norms: &[T]) -> GronwallFit<T> {
    gronwall_envelope_with_cap(record, z_norms, T::lit(GRONWALL_C2_CAP))
}

pub fn gronwall_envelope_with_cap<T: Real>(record: &TrajectoryRecord<T>, z_norms: &[T], cap: T) -> GronwallFit<T> {
    let n = record.len().min(record.energy_v.len()).min(z_norms.len());
    let (t, e, z) = (&record.times[..n], &record.energy_v[..n], &z_norms[..n]);
    let bad = GronwallFit { c1: T::infinity(), c2: T::infinity(), kappa: T::infinity(), violated: true };
    if n == 0 || record.blown_up() || e.iter().chain(z).any(|x| !x.is_finite()) {
        return bad;
    }
    let mut kappa = T::zero();
    let mut integral = T::zero();
    for k in 1..n {
        integral = integral + T::lit(0.5) * (t[k] - t[k - 1]) * (z[k] + z[k - 1]).abs();
        let growth = ((T::one() + e[k]) / (T::one() + e[0])).ln();
        if growth <= T::lit(FLAT) {
            continue;
        }
        kappa = if integral > T::zero() { kappa.max(growth / integral) } else { T::infinity() };
    }
    let zmax = z.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    let c2 = if kappa == T::zero() { T::zero() } else { kappa * zmax };
    if !(c2.is_finite() && c2 <= cap) {
        return GronwallFit { kappa, c2, ..bad };
    }
    let c1 = (0..n).fold(T::zero(), |a, k| a.max(e[k] * (-c2 * t[k]).exp()));
    GronwallFit { c1, c2, kappa, violated: !c1.is_finite() }
}
