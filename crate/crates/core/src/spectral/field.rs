use std::sync::Arc;

use num_complex::Complex;

use crate::scalar::Real;

use super::{FourierGrid, SpectralError};

/// Fourier coefficients of a real field on the lattice of a [`FourierGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    grid: Arc<FourierGrid>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: &Arc<FourierGrid>) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_coeffs(grid: &Arc<FourierGrid>, coeffs: Vec<Complex<T>>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Field with the listed modes; each conjugate partner is filled in.
    pub fn from_modes(grid: &Arc<FourierGrid>, modes: &[(&[i32], Complex<T>)]) -> Result<Self, SpectralError> {
        let mut f = Self::zeros(grid);
        for (n, c) in modes {
            f.set_mode(n, *c)?;
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn coeff(&self, n: &[i32]) -> Option<Complex<T>> {
        self.grid.index_of(n).map(|i| self.coeffs[i])
    }

    /// Sets `f̂(n) = c` and `f̂(−n) = c̄`; at `n = 0` only the real part is kept.
    pub fn set_mode(&mut self, n: &[i32], c: Complex<T>) -> Result<(), SpectralError> {
        let idx = self.grid.index_of(n).ok_or_else(|| SpectralError::OutsideLattice(n.to_vec()))?;
        let j = self.grid.conj_index(idx);
        if j == idx {
            self.coeffs[idx] = Complex::new(c.re, T::zero());
        } else {
            self.coeffs[idx] = c;
            self.coeffs[j] = c.conj();
        }
        Ok(())
    }

    /// `max_n |f̂(−n) − conj f̂(n)|`
    pub fn hermitian_defect(&self) -> T {
        let len = self.coeffs.len();
        (0..len.div_ceil(2))
            .map(|i| (self.coeffs[len - 1 - i] - self.coeffs[i].conj()).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Hermitian up to round-off relative to the largest coefficient.
    pub fn is_hermitian(&self) -> bool {
        let tol = T::epsilon().sqrt() * (T::one() + self.max_abs());
        self.hermitian_defect() <= tol
    }

    /// Replaces the field by its real part, `(f̂(n) + conj f̂(−n)) / 2`.
    pub fn enforce_hermitian(&mut self) {
        let len = self.coeffs.len();
        let half = T::lit(0.5);
        for i in 0..len / 2 {
            let j = len - 1 - i;
            let avg = (self.coeffs[i] + self.coeffs[j].conj()).scale(half);
            self.coeffs[i] = avg;
            self.coeffs[j] = avg.conj();
        }
        let c = len / 2;
        self.coeffs[c].im = T::zero();
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `‖f‖_{H^s} = (Σ ⟨n⟩^{2s} |f̂(n)|²)^{1/2}`
    pub fn sobolev_norm(&self, s: T) -> T {
        self.weighted_sq(|nsq| (T::one() + nsq).powf(s)).sqrt()
    }

    /// `‖f‖_{Ḣ^s} = (Σ |n|^{2s} |f̂(n)|²)^{1/2}`, with the zero mode dropped.
    pub fn homogeneous_norm(&self, s: T) -> T {
        self.weighted_sq(|nsq| if nsq > T::zero() { nsq.powf(s) } else { T::zero() }).sqrt()
    }

    /// `‖f‖_{L²}`
    pub fn l2_norm(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// `‖∇f‖²_{L²}`
    pub fn gradient_sq(&self) -> T {
        self.weighted_sq(|nsq| nsq)
    }

    fn weighted_sq(&self, weight: impl Fn(T) -> T) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| weight(T::lit(self.grid.norm_sq(i) as f64)) * c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
    }

    /// `∫ f g dx` for real fields.
    pub fn inner(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn check_grid(&self, other: &Self) -> Result<(), SpectralError> {
        if self.grid.same_lattice(&other.grid) {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }

    /// `self += a · other`
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert!(self.grid.same_lattice(&other.grid));
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x = *x + y.scale(a);
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c.scale(a)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    /// Spatial translation `f(· − a)`: multiplies `f̂(n)` by `e^{−in·a}`.
    pub fn translated(&self, shift: &[T]) -> Self {
        let d = self.grid.dim();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = self.grid.freq(i);
                let phase = (0..d).map(|a| T::lit(n[a] as f64) * shift[a]).fold(T::zero(), |x, y| x + y);
                c * Complex::from_polar(T::one(), -phase)
            })
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Copy onto another lattice: modes outside the target are dropped
    /// (projection `P_{≤N}`), missing ones are zero.
    pub fn resampled(&self, grid: &Arc<FourierGrid>) -> Result<Self, SpectralError> {
        if grid.dim() != self.grid.dim() {
            return Err(SpectralError::GridMismatch);
        }
        let mut out = Self::zeros(grid);
        let (small, large) = if self.grid.modes() <= grid.modes() {
            (&self.grid, grid)
        } else {
            (grid, &self.grid)
        };
        let map = small.embedding(large)?;
        if self.grid.modes() <= grid.modes() {
            for (i, &j) in map.iter().enumerate() {
                out.coeffs[j] = self.coeffs[i];
            }
        } else {
            for (i, &j) in map.iter().enumerate() {
                out.coeffs[i] = self.coeffs[j];
            }
        }
        Ok(out)
    }
}

/// The pair `(u, ∂ₜu)` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState<T> {
    pub u: SpectralField<T>,
    pub ut: SpectralField<T>,
}

impl<T: Real> SpectralState<T> {
    pub fn new(u: SpectralField<T>, ut: SpectralField<T>) -> Result<Self, SpectralError> {
        u.check_grid(&ut)?;
        Ok(Self { u, ut })
    }

    pub fn zeros(grid: &Arc<FourierGrid>) -> Self {
        Self { u: SpectralField::zeros(grid), ut: SpectralField::zeros(grid) }
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        self.u.grid()
    }

    /// `½(‖∂ₜu‖² + ‖∇u‖²)`
    pub fn linear_energy(&self) -> T {
        T::lit(0.5) * (self.ut.l2_norm().powi(2) + self.u.gradient_sq())
    }

    /// `(‖∇u‖² + ‖∂ₜu‖²)^{1/2}`, the Ḣ¹ × L² norm.
    pub fn energy_norm(&self) -> T {
        (self.u.gradient_sq() + self.ut.l2_norm().powi(2)).sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { u: self.u.add(&other.u), ut: self.ut.add(&other.ut) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { u: self.u.sub(&other.u), ut: self.ut.sub(&other.ut) }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { u: self.u.scaled(a), ut: self.ut.scaled(a) }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.ut.is_finite()
    }

    pub fn resampled(&self, grid: &Arc<FourierGrid>) -> Result<Self, SpectralError> {
        Ok(Self { u: self.u.resampled(grid)?, ut: self.ut.resampled(grid)? })
    }

    pub fn translated(&self, shift: &[T]) -> Self {
        Self { u: self.u.translated(shift), ut: self.ut.translated(shift) }
    }
}
