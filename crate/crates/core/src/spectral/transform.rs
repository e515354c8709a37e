use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::{torus_volume, Real};

use super::{FourierGrid, SpectralError, SpectralField};

/// Collocation transforms between lattice coefficients and grid values.
///
/// Multi-dimensional FFTs are pruned: axes are expanded (or contracted) one
/// at a time, so only lines that can carry lattice data are transformed. The
/// real last axis packs two lines into one complex FFT.
pub struct SpectralTransform<T: Real> {
    grid: Arc<FourierGrid>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scratch_len: usize,
    /// Residue `n mod L` of each per-axis lattice offset `n + M`.
    residues: Vec<usize>,
}

impl<T: Real> std::fmt::Debug for SpectralTransform<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform").field("grid", &self.grid).finish_non_exhaustive()
    }
}

/// Grid statistics gathered while the field is in physical space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseStats<T> {
    /// `sup |u|` over collocation points
    pub sup: T,
    /// `∫ |u|^{p+1} dx`
    pub potential: T,
    /// `∫ |u|^r dx` for the requested Lebesgue exponent (zero if none)
    pub lebesgue: T,
}

/// Lines per FFT call.
const BATCH: usize = 64;

impl<T: Real> SpectralTransform<T> {
    pub fn new(grid: &Arc<FourierGrid>) -> Self {
        let l = grid.colloc();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(l);
        let inverse = planner.plan_fft_inverse(l);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let m = grid.modes() as i64;
        let residues = (-m..=m).map(|k| k.rem_euclid(l as i64) as usize).collect();
        Self { grid: grid.clone(), forward, inverse, scratch_len, residues }
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    /// Grid values `u(x_j) = (2π)^{−d/2} Σ_n û(n) e^{in·x_j}`, `x_j = 2πj/L`.
    pub fn to_physical(&self, f: &SpectralField<T>) -> Result<Vec<T>, SpectralError> {
        self.check(f)?;
        if !f.is_hermitian() {
            return Err(SpectralError::NonHermitian { defect: f.hermitian_defect().to_f64_lossy() });
        }
        Ok(self.synthesize(f.coeffs()))
    }

    /// Discrete Fourier coefficients of grid values, truncated to the lattice.
    pub fn from_physical(&self, values: &[T]) -> Result<SpectralField<T>, SpectralError> {
        if values.len() != self.grid.colloc_len() {
            return Err(SpectralError::LengthMismatch { expected: self.grid.colloc_len(), got: values.len() });
        }
        let mut f = SpectralField::from_coeffs(&self.grid, self.analyze(values))?;
        f.enforce_hermitian();
        Ok(f)
    }

    /// `∫ g dx` by the collocation rectangle rule.
    pub fn quadrature(&self, values: &[T]) -> T {
        let sum = values.iter().fold(T::zero(), |a, &b| a + b);
        sum * self.cell_volume()
    }

    fn cell_volume(&self) -> T {
        torus_volume::<T>(self.grid.dim()) / T::lit(self.grid.colloc_len() as f64)
    }

    fn check(&self, f: &SpectralField<T>) -> Result<(), SpectralError> {
        if f.grid().same_lattice(&self.grid) {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }

    pub(crate) fn synthesize(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        let d = self.grid.dim();
        let (l, s) = (self.grid.colloc(), self.grid.side());
        let mut scratch = self.scratch();
        let mut buf = coeffs.to_vec();
        let mut dims = vec![s; d];
        for axis in 0..d - 1 {
            buf = self.expand_axis(&buf, &mut dims, axis, &mut scratch);
        }
        // last axis: every line is the spectrum of a real signal
        let lines = buf.len() / s;
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![T::zero(); lines * l];
        let mut batch = vec![zero; BATCH * l];
        let pairs = lines.div_ceil(2);
        let mut first = 0;
        while first < pairs {
            let count = BATCH.min(pairs - first);
            let chunk = &mut batch[..count * l];
            chunk.fill(zero);
            for j in 0..count {
                let a = 2 * (first + j);
                let line = &mut chunk[j * l..(j + 1) * l];
                for (k, &r) in self.residues.iter().enumerate() {
                    let x = buf[a * s + k];
                    let y = if a + 1 < lines { buf[(a + 1) * s + k] } else { zero };
                    line[r] = Complex::new(x.re - y.im, x.im + y.re);
                }
            }
            self.inverse.process_with_scratch(chunk, &mut scratch);
            for j in 0..count {
                let a = 2 * (first + j);
                let line = &chunk[j * l..(j + 1) * l];
                for (x, z) in out[a * l..(a + 1) * l].iter_mut().zip(line) {
                    *x = z.re;
                }
                if a + 1 < lines {
                    for (x, z) in out[(a + 1) * l..(a + 2) * l].iter_mut().zip(line) {
                        *x = z.im;
                    }
                }
            }
            first += count;
        }
        let scale = T::one() / torus_volume::<T>(d).sqrt();
        out.iter_mut().for_each(|x| *x = *x * scale);
        out
    }

    pub(crate) fn analyze(&self, values: &[T]) -> Vec<Complex<T>> {
        let d = self.grid.dim();
        let (l, s) = (self.grid.colloc(), self.grid.side());
        let mut scratch = self.scratch();
        let zero = Complex::new(T::zero(), T::zero());
        let lines = values.len() / l;
        let mut buf = vec![zero; lines * s];
        let mut batch = vec![zero; BATCH * l];
        let pairs = lines.div_ceil(2);
        let half = T::lit(0.5);
        let mut first = 0;
        while first < pairs {
            let count = BATCH.min(pairs - first);
            let chunk = &mut batch[..count * l];
            for j in 0..count {
                let a = 2 * (first + j);
                let line = &mut chunk[j * l..(j + 1) * l];
                for (x, z) in line.iter_mut().enumerate() {
                    let y = if a + 1 < lines { values[(a + 1) * l + x] } else { T::zero() };
                    *z = Complex::new(values[a * l + x], y);
                }
            }
            self.forward.process_with_scratch(chunk, &mut scratch);
            for j in 0..count {
                let a = 2 * (first + j);
                let line = &chunk[j * l..(j + 1) * l];
                for (k, &r) in self.residues.iter().enumerate() {
                    let zp = line[r];
                    let zm = line[(l - r) % l].conj();
                    // A = (Z_k + conj Z_{−k})/2, B = (Z_k − conj Z_{−k})/(2i)
                    buf[a * s + k] = (zp + zm).scale(half);
                    if a + 1 < lines {
                        let diff = (zp - zm).scale(half);
                        buf[(a + 1) * s + k] = Complex::new(diff.im, -diff.re);
                    }
                }
            }
            first += count;
        }
        let mut dims = vec![l; d];
        dims[d - 1] = s;
        for axis in (0..d - 1).rev() {
            buf = self.contract_axis(&buf, &mut dims, axis, &mut scratch);
        }
        let scale = torus_volume::<T>(d).sqrt() / T::lit(self.grid.colloc_len() as f64);
        buf.iter_mut().for_each(|c| *c = c.scale(scale));
        buf
    }

    fn scratch(&self) -> Vec<Complex<T>> {
        vec![Complex::new(T::zero(), T::zero()); self.scratch_len]
    }

    /// Inverse transform along `axis`, growing it from lattice side to `L`.
    fn expand_axis(&self, buf: &[Complex<T>], dims: &mut [usize], axis: usize, scratch: &mut [Complex<T>]) -> Vec<Complex<T>> {
        let (l, s) = (self.grid.colloc(), self.grid.side());
        self.axis_pass(buf, dims, axis, l, scratch, &self.inverse, |src, line| {
            for (k, &r) in self.residues.iter().enumerate() {
                line[r] = src(k);
            }
        }, |line, k| line[k], l, s)
    }

    /// Forward transform along `axis`, keeping only lattice residues.
    fn contract_axis(&self, buf: &[Complex<T>], dims: &mut [usize], axis: usize, scratch: &mut [Complex<T>]) -> Vec<Complex<T>> {
        let (l, s) = (self.grid.colloc(), self.grid.side());
        self.axis_pass(buf, dims, axis, s, scratch, &self.forward, |src, line| {
            for (x, z) in line.iter_mut().enumerate() {
                *z = src(x);
            }
        }, |line, k| line[self.residues[k]], l, l)
    }

    /// Generic strided pass: loads each line of length `dims[axis]` into a
    /// length-`L` buffer, transforms, and stores `n_out` outputs.
    #[allow(clippy::too_many_arguments)]
    fn axis_pass(
        &self,
        buf: &[Complex<T>],
        dims: &mut [usize],
        axis: usize,
        n_out: usize,
        scratch: &mut [Complex<T>],
        fft: &Arc<dyn Fft<T>>,
        load: impl Fn(&dyn Fn(usize) -> Complex<T>, &mut [Complex<T>]),
        pick: impl Fn(&[Complex<T>], usize) -> Complex<T>,
        l: usize,
        n_in: usize,
    ) -> Vec<Complex<T>> {
        debug_assert_eq!(dims[axis], n_in);
        let zero = Complex::new(T::zero(), T::zero());
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let mut out = vec![zero; outer * n_out * inner];
        let total = outer * inner;
        let mut batch = vec![zero; BATCH.min(total) * l];
        let mut first = 0;
        while first < total {
            let count = BATCH.min(total - first);
            let chunk = &mut batch[..count * l];
            chunk.fill(zero);
            for j in 0..count {
                let (o, i) = ((first + j) / inner, (first + j) % inner);
                let base = o * n_in * inner + i;
                load(&|k| buf[base + k * inner], &mut chunk[j * l..(j + 1) * l]);
            }
            fft.process_with_scratch(chunk, scratch);
            for j in 0..count {
                let (o, i) = ((first + j) / inner, (first + j) % inner);
                let base = o * n_out * inner + i;
                let line = &chunk[j * l..(j + 1) * l];
                for k in 0..n_out {
                    out[base + k * inner] = pick(line, k);
                }
            }
            first += count;
        }
        dims[axis] = n_out;
        out
    }

    /// Coefficients of `|u|^{p−1}u`, evaluated on the collocation grid and
    /// truncated back to the lattice.
    pub fn nonlinearity(&self, f: &SpectralField<T>, p: T) -> Result<SpectralField<T>, SpectralError> {
        self.nonlinearity_with_stats(f, p, None).map(|(n, _)| n)
    }

    /// As [`Self::nonlinearity`], also returning grid statistics of `u`; the
    /// Lebesgue integral `∫|u|^r` is computed when `r` is given.
    pub fn nonlinearity_with_stats(
        &self,
        f: &SpectralField<T>,
        p: T,
        r: Option<T>,
    ) -> Result<(SpectralField<T>, PointwiseStats<T>), SpectralError> {
        self.check(f)?;
        let mut values = self.synthesize(f.coeffs());
        let power = Power::new(p - T::one());
        let lebesgue_power = r.map(Power::new);
        let mut sup = T::zero();
        let mut potential = T::zero();
        let mut lebesgue = T::zero();
        for v in values.iter_mut() {
            let u = *v;
            let a = u.abs();
            sup = sup.max(a);
            let n = power.abs_pow(u) * u;
            potential = potential + n * u;
            if let Some(pw) = &lebesgue_power {
                lebesgue = lebesgue + pw.abs_pow(u);
            }
            *v = n;
        }
        if !(potential.is_finite() && lebesgue.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let w = self.cell_volume();
        let mut out = SpectralField::from_coeffs(&self.grid, self.analyze(&values))?;
        out.enforce_hermitian();
        if !out.is_finite() {
            return Err(SpectralError::NonFinite);
        }
        Ok((out, PointwiseStats { sup, potential: potential * w, lebesgue: lebesgue * w }))
    }

    /// Grid statistics of a field without forming the nonlinearity.
    pub fn pointwise_stats(&self, f: &SpectralField<T>, p: T, r: Option<T>) -> Result<PointwiseStats<T>, SpectralError> {
        self.check(f)?;
        let values = self.synthesize(f.coeffs());
        Ok(self.stats_of_values(&values, p, r))
    }

    pub fn stats_of_values(&self, values: &[T], p: T, r: Option<T>) -> PointwiseStats<T> {
        let potential_power = Power::new(p + T::one());
        let lebesgue_power = r.map(Power::new);
        let mut sup = T::zero();
        let mut potential = T::zero();
        let mut lebesgue = T::zero();
        for &u in values {
            sup = sup.max(u.abs());
            potential = potential + potential_power.abs_pow(u);
            if let Some(pw) = &lebesgue_power {
                lebesgue = lebesgue + pw.abs_pow(u);
            }
        }
        let w = self.cell_volume();
        PointwiseStats { sup, potential: potential * w, lebesgue: lebesgue * w }
    }

    /// `‖u‖_{L^r}` by collocation quadrature.
    pub fn lebesgue_norm(&self, f: &SpectralField<T>, r: T) -> Result<T, SpectralError> {
        let stats = self.pointwise_stats(f, T::one(), Some(r))?;
        Ok(stats.lebesgue.powf(T::one() / r))
    }
}

/// `|u|^e`, with integer and third-integer exponents taken by
/// multiplication and `cbrt`.
enum Power<T> {
    Even(i32),
    Int(i32),
    Thirds(i32, i32),
    Frac(T),
}

impl<T: Real> Power<T> {
    fn new(e: T) -> Self {
        if e.fract() == T::zero() && e.abs() < T::lit(64.0) {
            let k = e.to_i32().unwrap_or(0);
            if k % 2 == 0 {
                Power::Even(k)
            } else {
                Power::Int(k)
            }
        } else {
            let thirds = e * T::lit(3.0);
            let k = thirds.round();
            if (thirds - k).abs() < T::lit(1e-5) && e > T::zero() && e < T::lit(64.0) {
                let k = k.to_i32().unwrap_or(0);
                Power::Thirds(k / 3, k % 3)
            } else {
                Power::Frac(e)
            }
        }
    }

    #[inline]
    fn abs_pow(&self, u: T) -> T {
        match *self {
            Power::Even(k) => u.powi(k),
            Power::Int(k) => u.abs().powi(k),
            Power::Thirds(whole, rem) => {
                let a = u.abs();
                a.powi(whole) * T::lit(cube_root(a.to_f64_lossy())).powi(rem)
            }
            Power::Frac(e) => {
                if u == T::zero() {
                    T::zero()
                } else {
                    u.abs().powf(e)
                }
            }
        }
    }
}

/// `x^{1/3}` for `x ≥ 0`: exponent-halving seed and three Halley steps.
#[inline]
fn cube_root(x: f64) -> f64 {
    if !(x > 1e-290 && x < 1e290) {
        return x.cbrt();
    }
    let mut y = f64::from_bits(x.to_bits() / 3 + 0x2A9F_7893_782D_A1CE);
    for _ in 0..3 {
        let y3 = y * y * y;
        y *= (y3 + 2.0 * x) / (2.0 * y3 + x);
    }
    y
}

/// Collocation padding factor: exact dealiasing `⌈(p+1)/2⌉` for integer `p`,
/// `3/2` otherwise.
pub fn dealias_pad(p: f64) -> f64 {
    if p.fract() == 0.0 {
        ((p + 1.0) / 2.0).ceil().max(1.0)
    } else {
        1.5
    }
}
