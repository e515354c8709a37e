use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::energy::energy_from_potential;
use crate::lwp::XExponents;
use crate::noise::{ConvolutionSampler, ConvolutionState, NoiseMultiplier, NoiseStream};
use crate::scalar::Real;
use crate::spectral::{FourierGrid, PointwiseStats, SpectralField, SpectralState, SpectralTransform};

use super::{FieldPath, LinearPropagator, SolverError, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// half kick, free flow, half kick
    #[default]
    Strang,
    /// full kick, free flow
    Lie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub h: T,
    pub horizon: T,
    /// Power of the nonlinearity `|u|^{p−1}u`.
    pub p: T,
    pub scheme: Scheme,
    /// Collocation sup-norm guard.
    pub blowup_threshold: T,
    /// When false the kick is dropped and the equation is linear.
    pub nonlinear: bool,
    /// Diagnostics stride in steps.
    pub save_every: usize,
    /// Keep `(u, ∂ₜu)` at every saved time.
    pub keep_states: bool,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(h: T, horizon: T, p: T) -> Self {
        Self {
            h,
            horizon,
            p,
            scheme: Scheme::Strang,
            blowup_threshold: T::lit(1e6),
            nonlinear: true,
            save_every: 1,
            keep_states: false,
        }
    }

    /// Energy-critical power `1 + 4/(d − 2)`, defined for `d ≥ 3`.
    pub fn critical_power(dim: usize) -> Option<T> {
        (dim >= 3).then(|| T::one() + T::lit(4.0) / T::lit(dim as f64 - 2.0))
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.to_string()));
        if !(self.h > T::zero() && self.h.is_finite()) {
            return bad("h must be positive");
        }
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return bad("horizon must be positive");
        }
        if !(self.p >= T::one() && self.p.is_finite()) {
            return bad("p must be at least 1");
        }
        if !(self.blowup_threshold > T::zero()) {
            return bad("blowup_threshold must be positive");
        }
        if self.save_every == 0 {
            return bad("save_every must be at least 1");
        }
        Ok(())
    }

    /// Number of steps; the last one ends at or just past the horizon.
    pub fn steps(&self) -> usize {
        {
            let x = self.horizon / self.h;
            (x - T::epsilon().sqrt() * x.max(T::one())).ceil()
        }.to_usize().unwrap_or(0).max(1)
    }
}

/// Splitting integrator for `∂ₜ²v − Δv + N(v + Ψ) = 0` with the stochastic
/// convolution `Ψ` sampled exactly alongside; `u = v + Ψ`.
///
/// The linear flow is exact per mode and the nonlinearity enters as velocity
/// kicks evaluated at stage endpoints, so only one collocation round trip is
/// needed per step.
#[derive(Debug)]
pub struct WaveSolver<T: Real> {
    transform: SpectralTransform<T>,
    propagator: LinearPropagator<T>,
    sampler: Option<ConvolutionSampler<T>>,
    cfg: SolverConfig<T>,
    xexp: Option<XExponents<T>>,
}

/// Current force `N(v + Ψ)` and the grid statistics of `v + Ψ`.
struct Kick<T> {
    force: SpectralField<T>,
    stats: PointwiseStats<T>,
}

impl<T: Real> WaveSolver<T> {
    pub fn new(grid: &Arc<FourierGrid>, cfg: SolverConfig<T>, phi: &NoiseMultiplier<T>) -> Result<Self, SolverError> {
        cfg.validate()?;
        if !phi.grid().same_lattice(grid) {
            return Err(SolverError::GridMismatch);
        }
        let sampler = (!phi.is_zero()).then(|| ConvolutionSampler::new(phi, cfg.h));
        Ok(Self {
            transform: SpectralTransform::new(grid),
            propagator: LinearPropagator::new(grid, cfg.h),
            sampler,
            xexp: XExponents::for_dim(grid.dim()),
            cfg,
        })
    }

    /// Deterministic solver (`φ = 0`).
    pub fn deterministic(grid: &Arc<FourierGrid>, cfg: SolverConfig<T>) -> Result<Self, SolverError> {
        Self::new(grid, cfg, &NoiseMultiplier::zero(grid))
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        self.transform.grid()
    }

    pub fn transform(&self) -> &SpectralTransform<T> {
        &self.transform
    }

    pub fn x_exponents(&self) -> Option<XExponents<T>> {
        self.xexp
    }

    fn kick(&self, v: &SpectralField<T>, psi: Option<&SpectralField<T>>, t: T) -> Result<Kick<T>, SolverError> {
        let shifted;
        let u = match psi {
            Some(psi) => {
                shifted = v.add(psi);
                &shifted
            }
            None => v,
        };
        let r = self.xexp.map(|x| x.r);
        let blow = |_| SolverError::BlowUp { t: t.to_f64_lossy() };
        let (force, stats) = if self.cfg.nonlinear {
            self.transform.nonlinearity_with_stats(u, self.cfg.p, r).map_err(blow)?
        } else {
            let stats = self.transform.pointwise_stats(u, self.cfg.p, r).map_err(blow)?;
            (SpectralField::zeros(self.grid()), stats)
        };
        if !(stats.sup <= self.cfg.blowup_threshold) {
            return Err(SolverError::BlowUp { t: t.to_f64_lossy() });
        }
        Ok(Kick { force, stats })
    }

    /// `∂ₜv += dt · (−N + ε f)`
    fn apply_kick(v: &mut SpectralState<T>, kick: &Kick<T>, source: Option<(&SpectralField<T>, T)>, dt: T) {
        v.ut.axpy(-dt, &kick.force);
        if let Some((f, eps)) = source {
            v.ut.axpy(dt * eps, f);
        }
    }

    /// Advances `v` by one step given the kick at the current time; returns
    /// the kick at the new time.
    fn advance(
        &self,
        v: &mut SpectralState<T>,
        now: &Kick<T>,
        psi_next: Option<&SpectralField<T>>,
        source: Option<((&SpectralField<T>, &SpectralField<T>), T)>,
        t_next: T,
    ) -> Result<Kick<T>, SolverError> {
        let h = self.cfg.h;
        match self.cfg.scheme {
            Scheme::Strang => {
                let half = h * T::lit(0.5);
                Self::apply_kick(v, now, source.map(|((f, _), e)| (f, e)), half);
                self.propagator.apply(v);
                let next = self.kick(&v.u, psi_next, t_next)?;
                Self::apply_kick(v, &next, source.map(|((_, f), e)| (f, e)), half);
                Ok(next)
            }
            Scheme::Lie => {
                Self::apply_kick(v, now, source.map(|((f, _), e)| (f, e)), h);
                self.propagator.apply(v);
                self.kick(&v.u, psi_next, t_next)
            }
        }
    }

    /// One step from `(v, Ψ)` at `conv.t`.
    pub fn step(
        &self,
        v: &SpectralState<T>,
        conv: &ConvolutionState<T>,
        stream: &mut NoiseStream,
    ) -> Result<(SpectralState<T>, ConvolutionState<T>), SolverError> {
        self.check(v)?;
        let now = self.kick(&v.u, Some(&conv.psi), conv.t)?;
        let mut v = v.clone();
        let mut conv = conv.clone();
        if let Some(s) = &self.sampler {
            s.step(&mut conv, stream);
        } else {
            self.propagator.apply_pair(&mut conv.psi, &mut conv.psit);
            conv.t = conv.t + self.cfg.h;
            conv.step += 1;
        }
        self.advance(&mut v, &now, Some(&conv.psi), None, conv.t)?;
        Ok((v, conv))
    }

    fn check(&self, v: &SpectralState<T>) -> Result<(), SolverError> {
        if v.grid().same_lattice(self.grid()) {
            Ok(())
        } else {
            Err(SolverError::GridMismatch)
        }
    }

    /// Full trajectory from `u0` with noise drawn from `(seed, trajectory)`.
    ///
    /// A sup-norm or non-finite failure ends the run early with
    /// `blow_up` set; the diagnostics up to that point are kept.
    pub fn simulate(&self, u0: &SpectralState<T>, seed: u64, trajectory: u64) -> Result<TrajectoryRecord<T>, SolverError> {
        self.check(u0)?;
        let mut stream = NoiseStream::new(seed, trajectory);
        let mut rec = TrajectoryRecord::new(trajectory, seed);
        rec.x_exponents = self.xexp;
        let mut v = u0.clone();
        let mut conv = ConvolutionState::zeros(self.grid());
        let mut now = match self.kick(&v.u, None, T::zero()) {
            Ok(k) => k,
            Err(SolverError::BlowUp { .. }) => {
                rec.blow_up = Some(T::zero());
                return Ok(rec);
            }
            Err(e) => return Err(e),
        };
        self.save(&mut rec, &v, &conv, &now, T::zero())?;
        let mut x_acc = T::zero();
        let mut x_prev = self.x_density(&now.stats);
        let steps = self.cfg.steps();
        for k in 1..=steps {
            let t = self.cfg.h * T::lit(k as f64);
            let psi_next = match &self.sampler {
                Some(s) => {
                    s.step(&mut conv, &mut stream);
                    Some(&conv.psi)
                }
                None => {
                    conv.t = t;
                    conv.step += 1;
                    None
                }
            };
            now = match self.advance(&mut v, &now, psi_next, None, t) {
                Ok(kick) => kick,
                Err(SolverError::BlowUp { .. }) => {
                    rec.blow_up = Some(t);
                    return Ok(rec);
                }
                Err(e) => return Err(e),
            };
            let x_next = self.x_density(&now.stats);
            x_acc = x_acc + T::lit(0.5) * self.cfg.h * (x_prev + x_next);
            x_prev = x_next;
            if k % self.cfg.save_every == 0 || k == steps {
                rec.x_increments.push(x_acc);
                x_acc = T::zero();
                self.save(&mut rec, &v, &conv, &now, t)?;
            }
        }
        Ok(rec)
    }

    /// `‖u‖_{L^r}^q` from grid statistics.
    fn x_density(&self, stats: &PointwiseStats<T>) -> T {
        match self.xexp {
            Some(x) => stats.lebesgue.powf(x.q / x.r),
            None => T::zero(),
        }
    }

    fn save(
        &self,
        rec: &mut TrajectoryRecord<T>,
        v: &SpectralState<T>,
        conv: &ConvolutionState<T>,
        now: &Kick<T>,
        t: T,
    ) -> Result<(), SolverError> {
        let u = if self.sampler.is_some() { v.add(&conv.to_state()) } else { v.clone() };
        let p = self.cfg.p;
        // without the kick the conserved quantity is the quadratic energy
        let keep = if self.cfg.nonlinear { T::one() } else { T::zero() };
        let e_u = energy_from_potential(&u, keep * now.stats.potential, p);
        let (e_v, sup_psi) = if self.sampler.is_some() {
            let st = self.transform.pointwise_stats(&v.u, p, None)?;
            let psi = self.transform.pointwise_stats(&conv.psi, T::one(), None)?;
            (energy_from_potential(v, keep * st.potential, p), psi.sup)
        } else {
            (e_u, T::zero())
        };
        rec.times.push(t);
        rec.energy_u.push(e_u);
        rec.energy_v.push(e_v);
        rec.h1_u.push(u.u.sobolev_norm(T::one()));
        rec.l2_ut.push(u.ut.l2_norm());
        rec.sup_u.push(now.stats.sup);
        rec.sup_psi.push(sup_psi);
        if rec.x_increments.len() < rec.times.len() {
            rec.x_increments.push(T::zero());
        }
        if self.cfg.keep_states {
            rec.states.push(u);
        }
        Ok(())
    }

    /// Integrates `steps` steps from `v0` with an optional prescribed shift
    /// path `Ψ` inside the nonlinearity and an optional source `ε f` on the
    /// right-hand side. Both paths must share the solver step; the returned
    /// vector holds `v` at every node.
    pub fn run_path(
        &self,
        v0: &SpectralState<T>,
        shift: Option<&FieldPath<T>>,
        source: Option<(&FieldPath<T>, T)>,
        steps: usize,
    ) -> Result<Vec<SpectralState<T>>, SolverError> {
        self.check(v0)?;
        for path in shift.iter().copied().chain(source.map(|(f, _)| f)) {
            if path.len() < steps + 1 {
                return Err(SolverError::PathTooShort { needed: steps + 1, got: path.len() });
            }
            if (path.h - self.cfg.h).abs() > T::lit(1e-9) * self.cfg.h {
                return Err(SolverError::InvalidConfig("path step differs from solver step".into()));
            }
        }
        let t0 = shift.map(|p| p.t0).unwrap_or(T::zero());
        let mut v = v0.clone();
        let mut now = self.kick(&v.u, shift.map(|p| &p.fields[0]), t0)?;
        let mut out = Vec::with_capacity(steps + 1);
        out.push(v.clone());
        for k in 1..=steps {
            let t = t0 + self.cfg.h * T::lit(k as f64);
            let src = source.map(|(f, e)| ((&f.fields[k - 1], &f.fields[k]), e));
            now = self.advance(&mut v, &now, shift.map(|p| &p.fields[k]), src, t)?;
            out.push(v.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_cover_horizon() {
        let c = SolverConfig::new(1e-3, 1.0, 5.0);
        assert_eq!(c.steps(), 1000);
        let c = SolverConfig::new(0.3, 1.0, 5.0);
        assert_eq!(c.steps(), 4);
    }

    #[test]
    fn critical_power() {
        assert_eq!(SolverConfig::<f64>::critical_power(3), Some(5.0));
        assert_eq!(SolverConfig::<f64>::critical_power(4), Some(3.0));
        assert!((SolverConfig::<f64>::critical_power(5).unwrap() - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(SolverConfig::<f64>::critical_power(2), None);
    }

    #[test]
    fn rejects_bad_config() {
        let g = FourierGrid::new(3, 2, 3.0).unwrap();
        let mut c = SolverConfig::new(0.0, 1.0, 5.0);
        assert!(WaveSolver::deterministic(&g, c.clone()).is_err());
        c.h = 0.1;
        c.p = 0.5;
        assert!(WaveSolver::deterministic(&g, c.clone()).is_err());
        c.p = 5.0;
        c.save_every = 0;
        assert!(WaveSolver::deterministic(&g, c).is_err());
    }
}
