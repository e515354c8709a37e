use crate::scalar::Real;
use crate::spectral::{SpectralField, SpectralState};

/// Fields sampled on the uniform time grid `t0 + k h`.
#[derive(Debug, Clone)]
pub struct FieldPath<T> {
    pub t0: T,
    pub h: T,
    pub fields: Vec<SpectralField<T>>,
}

impl<T: Real> FieldPath<T> {
    pub fn new(t0: T, h: T, fields: Vec<SpectralField<T>>) -> Self {
        Self { t0, h, fields }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn time(&self, k: usize) -> T {
        self.t0 + self.h * T::lit(k as f64)
    }

    pub fn end(&self) -> T {
        self.time(self.len().saturating_sub(1))
    }

    /// Node index of `t`, if `t` is a node within the path.
    pub fn node(&self, t: T) -> Option<usize> {
        let x = (t - self.t0) / self.h;
        let k = x.round();
        if (x - k).abs() > T::lit(1e-6) || k < T::zero() {
            return None;
        }
        let k = k.to_usize()?;
        (k < self.len()).then_some(k)
    }

    /// Every `stride`-th node, starting from the first.
    pub fn subsample(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        Self {
            t0: self.t0,
            h: self.h * T::lit(stride as f64),
            fields: self.fields.iter().step_by(stride).cloned().collect(),
        }
    }

    /// Nodes `first..=last`.
    pub fn window(&self, first: usize, last: usize) -> Self {
        Self { t0: self.time(first), h: self.h, fields: self.fields[first..=last].to_vec() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            t0: self.t0,
            h: self.h,
            fields: self.fields.iter().zip(&other.fields).map(|(a, b)| a.sub(b)).collect(),
        }
    }
}

/// States `(v, ∂ₜv)` on the uniform time grid `t0 + k h`.
#[derive(Debug, Clone)]
pub struct StatePath<T> {
    pub t0: T,
    pub h: T,
    pub states: Vec<SpectralState<T>>,
}

impl<T: Real> StatePath<T> {
    pub fn new(t0: T, h: T, states: Vec<SpectralState<T>>) -> Self {
        Self { t0, h, states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn end(&self) -> T {
        self.t0 + self.h * T::lit(self.len().saturating_sub(1) as f64)
    }

    /// The position components as a field path.
    pub fn positions(&self) -> FieldPath<T> {
        FieldPath::new(self.t0, self.h, self.states.iter().map(|s| s.u.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            t0: self.t0,
            h: self.h,
            states: self.states.iter().zip(&other.states).map(|(a, b)| a.sub(b)).collect(),
        }
    }
}
