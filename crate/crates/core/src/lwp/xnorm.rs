use crate::scalar::Real;
use crate::spectral::{SpectralField, SpectralTransform};
use crate::wave::{FieldPath, StatePath};

use super::LwpError;

/// Exponents of the critical Strichartz space `L^q_t L^r_x`,
/// `q = (d+2)/(d−2)`, `r = 2(d+2)/(d−2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XExponents<T> {
    pub q: T,
    pub r: T,
}

impl<T: Real> XExponents<T> {
    pub fn for_dim(dim: usize) -> Option<Self> {
        (dim >= 3).then(|| {
            let d = T::lit(dim as f64);
            let two = T::lit(2.0);
            Self { q: (d + two) / (d - two), r: two * (d + two) / (d - two) }
        })
    }
}

/// Discrete `‖u‖_{L^q([a,b]; L^r(T^d))}`: composite trapezoid in time of
/// `‖u(t_k)‖_{L^r}^q`, then the `q`-th root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XNorm<T> {
    pub a: T,
    pub b: T,
    pub value: T,
    pub q: T,
    pub r: T,
}

impl<T: Real> XNorm<T> {
    /// `value^q`, additive over adjacent intervals.
    pub fn power(&self) -> T {
        self.value.powf(self.q)
    }
}

/// `‖u‖_{L^r}^q` at every node.
pub(crate) fn densities<T: Real>(
    transform: &SpectralTransform<T>,
    fields: &[SpectralField<T>],
    exps: XExponents<T>,
) -> Result<Vec<T>, LwpError> {
    fields.iter().map(|f| density(transform, f, exps)).collect()
}

pub(crate) fn density<T: Real>(transform: &SpectralTransform<T>, f: &SpectralField<T>, exps: XExponents<T>) -> Result<T, LwpError> {
    let stats = transform.pointwise_stats(f, T::one(), Some(exps.r))?;
    let d = stats.lebesgue.powf(exps.q / exps.r);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(LwpError::NonFinite)
    }
}

/// Trapezoid sum of `dens[first..=last]` with spacing `h`.
pub(crate) fn trapezoid<T: Real>(dens: &[T], h: T, first: usize, last: usize) -> T {
    if last <= first {
        return T::zero();
    }
    let inner = dens[first + 1..last].iter().fold(T::zero(), |a, &b| a + b);
    h * (inner + T::lit(0.5) * (dens[first] + dens[last]))
}

pub(crate) fn exponents<T: Real>(transform: &SpectralTransform<T>) -> Result<XExponents<T>, LwpError> {
    XExponents::for_dim(transform.grid().dim()).ok_or(LwpError::Dimension)
}

/// X-norm of a field path over `[a, b]`; both ends must be path nodes.
pub fn x_norm<T: Real>(transform: &SpectralTransform<T>, path: &FieldPath<T>, a: T, b: T) -> Result<XNorm<T>, LwpError> {
    let exps = exponents(transform)?;
    let outside = || LwpError::IntervalOutside { a: a.to_f64_lossy(), b: b.to_f64_lossy() };
    let (first, last) = match (path.node(a), path.node(b)) {
        (Some(i), Some(j)) if i <= j => (i, j),
        _ => return Err(outside()),
    };
    let dens = densities(transform, &path.fields[first..=last], exps)?;
    let power = trapezoid(&dens, path.h, 0, dens.len() - 1);
    Ok(XNorm { a, b, value: power.powf(T::one() / exps.q), q: exps.q, r: exps.r })
}

/// X-norm of the position component of a state path.
pub fn x_norm_states<T: Real>(transform: &SpectralTransform<T>, path: &StatePath<T>, a: T, b: T) -> Result<XNorm<T>, LwpError> {
    x_norm(transform, &path.positions(), a, b)
}
