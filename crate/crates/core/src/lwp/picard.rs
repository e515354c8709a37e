use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::scalar::Real;
use crate::spectral::{FourierGrid, SpectralField, SpectralState, SpectralTransform};
use crate::wave::{FieldPath, LinearPropagator, StatePath};

use super::quadrature::{gauss_legendre, integrate};
use super::xnorm::{densities, exponents, trapezoid, XExponents};
use super::LwpError;

/// Discrete Duhamel map on a uniform node grid of step `h`:
///
/// ```text
/// Γ[v](t_k) = V(t_k − a)(v₀, v₁) − ∫_a^{t_k} S(t_k − s) N(v + Ψ)(s) ds
/// ```
///
/// with `N` interpolated linearly between nodes and the kernel integrated
/// exactly per mode (product trapezoid rule). Over one step this reads
/// `W_k = R(h) W_{k−1} − (a₀ g_{k−1} + a₁ g_k, b₀ g_{k−1} + b₁ g_k)` with
/// weights
///
/// ```text
/// a₀ = ∫₀ʰ sin(σ|n|)/|n| · σ/h dσ      a₁ = ∫₀ʰ sin(σ|n|)/|n| · (1 − σ/h) dσ
/// b₀ = ∫₀ʰ cos(σ|n|) · σ/h dσ          b₁ = ∫₀ʰ cos(σ|n|) · (1 − σ/h) dσ
/// ```
#[derive(Debug)]
pub struct DuhamelMap<T: Real> {
    transform: SpectralTransform<T>,
    propagator: LinearPropagator<T>,
    exps: XExponents<T>,
    p: T,
    weights: Vec<[T; 4]>,
}

#[derive(Debug, Clone)]
pub struct PicardOptions<T> {
    /// Smallness threshold for the free evolution and the forcing.
    pub eta: T,
    /// Stop once the X-norm of successive differences drops below this.
    pub tol: T,
    pub max_iter: usize,
    /// Starting iterate; the free evolution when absent.
    pub initial: Option<StatePath<T>>,
}

impl<T: Real> Default for PicardOptions<T> {
    fn default() -> Self {
        Self { eta: T::lit(0.05), tol: T::lit(1e-10), max_iter: 50, initial: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardReport<T> {
    /// X-norm of `v^{(j+1)} − v^{(j)}` for every iteration performed.
    pub residuals: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
    /// X-norm of the returned iterate.
    pub x_norm: T,
    /// X-norm of the free evolution of the data.
    pub free_norm: T,
    /// X-norm of the forcing path.
    pub forcing_norm: T,
    pub eta: T,
}

impl<T: Real> PicardReport<T> {
    /// `residual[j+1] / residual[j]`.
    pub fn ratios(&self) -> Vec<T> {
        self.residuals.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Whether the solution lies in the ball `‖v‖_X ≤ 3η`.
    pub fn within_ball(&self) -> bool {
        self.x_norm <= T::lit(3.0) * self.eta
    }
}

impl<T: Real> DuhamelMap<T> {
    pub fn new(grid: &Arc<FourierGrid>, h: T, p: T) -> Result<Self, LwpError> {
        if !(h > T::zero() && h.is_finite()) {
            return Err(LwpError::Invalid("step must be positive".into()));
        }
        let transform = SpectralTransform::new(grid);
        let exps = exponents(&transform)?;
        let rule = gauss_legendre(16);
        let hf = h.to_f64_lossy();
        let mut cache = HashMap::new();
        let weights = (0..grid.len())
            .map(|idx| {
                *cache
                    .entry(grid.norm_sq(idx))
                    .or_insert_with(|| filon_weights(grid.abs_freq::<f64>(idx), hf, &rule).map(T::lit))
            })
            .collect();
        Ok(Self { transform, propagator: LinearPropagator::new(grid, h), exps, p, weights })
    }

    pub fn h(&self) -> T {
        self.propagator.h()
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        self.transform.grid()
    }

    pub fn transform(&self) -> &SpectralTransform<T> {
        &self.transform
    }

    pub fn exponents(&self) -> XExponents<T> {
        self.exps
    }

    /// Node count of `[a, b]`.
    pub(crate) fn steps(&self, a: T, b: T) -> Result<usize, LwpError> {
        let x = (b - a) / self.h();
        let k = x.round();
        if !(k >= T::one()) || (x - k).abs() > T::lit(1e-6) * k.max(T::one()) {
            return Err(LwpError::Invalid(format!(
                "[{a}, {b}] is not a positive multiple of the step {}",
                self.h()
            )));
        }
        Ok(k.to_usize().unwrap_or(0))
    }

    /// `V(t_k − a) data` for `k = 0..=steps`.
    pub fn free_evolution(&self, data: &SpectralState<T>, steps: usize) -> Vec<SpectralState<T>> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut s = data.clone();
        out.push(s.clone());
        for _ in 0..steps {
            self.propagator.apply(&mut s);
            out.push(s.clone());
        }
        out
    }

    /// Free flow over one step, in place.
    pub(crate) fn free_step(&self, s: &mut SpectralState<T>) {
        self.propagator.apply(s);
    }

    /// Forcing values on the nodes of `[a, a + steps h]`; zeros if absent.
    pub(crate) fn forcing_window(
        &self,
        forcing: Option<&FieldPath<T>>,
        a: T,
        steps: usize,
    ) -> Result<Vec<SpectralField<T>>, LwpError> {
        match forcing {
            None => Ok(vec![SpectralField::zeros(self.grid()); steps + 1]),
            Some(f) => {
                if (f.h - self.h()).abs() > T::lit(1e-9) * self.h() {
                    return Err(LwpError::Invalid("forcing step differs from solver step".into()));
                }
                if !f.fields.first().is_some_and(|x| x.grid().same_lattice(self.grid())) {
                    return Err(LwpError::Invalid("forcing lives on another lattice".into()));
                }
                let b = a + self.h() * T::lit(steps as f64);
                let outside = || LwpError::IntervalOutside { a: a.to_f64_lossy(), b: b.to_f64_lossy() };
                let first = f.node(a).ok_or_else(outside)?;
                if first + steps >= f.len() {
                    return Err(outside());
                }
                Ok(f.fields[first..=first + steps].to_vec())
            }
        }
    }

    /// X-norm over all nodes of a list of positions.
    pub(crate) fn x_of(&self, fields: &[SpectralField<T>]) -> Result<T, LwpError> {
        let dens = densities(&self.transform, fields, self.exps)?;
        Ok(trapezoid(&dens, self.h(), 0, dens.len() - 1).powf(T::one() / self.exps.q))
    }

    /// One application of `Γ` to the node values `v`.
    pub fn apply(
        &self,
        data: &SpectralState<T>,
        v: &[SpectralState<T>],
        psi: &[SpectralField<T>],
    ) -> Result<Vec<SpectralState<T>>, LwpError> {
        let forces = v
            .iter()
            .zip(psi)
            .map(|(s, f)| {
                let u = s.u.add(f);
                self.transform.nonlinearity(&u, self.p).map_err(|_| LwpError::NonFinite)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::with_capacity(v.len());
        let mut w = data.clone();
        out.push(w.clone());
        for k in 1..v.len() {
            self.propagator.apply(&mut w);
            let (g0, g1) = (forces[k - 1].coeffs(), forces[k].coeffs());
            let (us, uts) = (w.u.coeffs_mut(), w.ut.coeffs_mut());
            for (idx, [a0, a1, b0, b1]) in self.weights.iter().copied().enumerate() {
                us[idx] = us[idx] - g0[idx].scale(a0) - g1[idx].scale(a1);
                uts[idx] = uts[idx] - g0[idx].scale(b0) - g1[idx].scale(b1);
            }
            out.push(w.clone());
        }
        Ok(out)
    }

    /// Picard iteration for `v = Γ[v]` on `[a, b]` after checking the
    /// smallness conditions of the contraction argument.
    pub fn solve(
        &self,
        data: &SpectralState<T>,
        forcing: Option<&FieldPath<T>>,
        a: T,
        b: T,
        opts: &PicardOptions<T>,
    ) -> Result<(StatePath<T>, PicardReport<T>), LwpError> {
        if !data.grid().same_lattice(self.grid()) {
            return Err(LwpError::Invalid("data lives on another lattice".into()));
        }
        let steps = self.steps(a, b)?;
        let psi = self.forcing_window(forcing, a, steps)?;
        let free = self.free_evolution(data, steps);
        let positions = |s: &[SpectralState<T>]| s.iter().map(|x| x.u.clone()).collect::<Vec<_>>();
        let free_norm = self.x_of(&positions(&free))?;
        let forcing_norm = if forcing.is_some() { self.x_of(&psi)? } else { T::zero() };
        if free_norm > opts.eta || forcing_norm > opts.eta {
            return Err(LwpError::IntervalTooLong {
                free: free_norm.to_f64_lossy(),
                forcing: forcing_norm.to_f64_lossy(),
                eta: opts.eta.to_f64_lossy(),
            });
        }
        let mut v = match &opts.initial {
            Some(init) if init.len() == steps + 1 => init.states.clone(),
            Some(init) => {
                return Err(LwpError::Invalid(format!("initial iterate has {} nodes, {} needed", init.len(), steps + 1)))
            }
            None => free,
        };
        let mut residuals = Vec::new();
        let mut converged = false;
        for _ in 0..opts.max_iter {
            let next = self.apply(data, &v, &psi)?;
            let diff: Vec<_> = next.iter().zip(&v).map(|(x, y)| x.u.sub(&y.u)).collect();
            let res = self.x_of(&diff)?;
            residuals.push(res);
            v = next;
            if res < opts.tol {
                converged = true;
                break;
            }
        }
        let x_norm = self.x_of(&positions(&v))?;
        let report = PicardReport {
            iterations: residuals.len(),
            residuals,
            converged,
            x_norm,
            free_norm,
            forcing_norm,
            eta: opts.eta,
        };
        Ok((StatePath::new(a, self.h(), v), report))
    }
}

/// `[a₀, a₁, b₀, b₁]` for frequency magnitude `k`.
fn filon_weights(k: f64, h: f64, rule: &(Vec<f64>, Vec<f64>)) -> [f64; 4] {
    let panel = if k > 0.0 { (2.0 / k).min(h) } else { h };
    let sinc = |s: f64| if k == 0.0 { s } else { (k * s).sin() / k };
    [
        integrate(h, panel, rule, |s| sinc(s) * s / h),
        integrate(h, panel, rule, |s| sinc(s) * (1.0 - s / h)),
        integrate(h, panel, rule, |s| (k * s).cos() * s / h),
        integrate(h, panel, rule, |s| (k * s).cos() * (1.0 - s / h)),
    ]
}

/// Builds a [`DuhamelMap`] and solves on `[a, b]`.
#[allow(clippy::too_many_arguments)]
pub fn picard_solve<T: Real>(
    data: &SpectralState<T>,
    forcing: Option<&FieldPath<T>>,
    a: T,
    b: T,
    h: T,
    p: T,
    opts: &PicardOptions<T>,
) -> Result<(StatePath<T>, PicardReport<T>), LwpError> {
    DuhamelMap::new(data.grid(), h, p)?.solve(data, forcing, a, b, opts)
}
