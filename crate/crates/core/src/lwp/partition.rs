use crate::scalar::Real;
use crate::spectral::SpectralState;
use crate::wave::{FieldPath, StatePath};

use super::picard::{DuhamelMap, PicardOptions, PicardReport};
use super::xnorm::{density, densities};
use super::LwpError;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOptions<T> {
    /// Node spacing.
    pub h: T,
    /// Power of the nonlinearity.
    pub p: T,
    /// More intervals than this signals likely blow-up.
    pub cap: usize,
}

impl<T: Real> PartitionOptions<T> {
    pub fn new(h: T, p: T) -> Self {
        Self { h, p, cap: 10_000 }
    }
}

/// Consecutive intervals `[t_j, t_{j+1}]` covering `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    pub intervals: Vec<(T, T)>,
    pub eta: T,
}

impl<T: Real> Partition<T> {
    /// The number of intervals `J`.
    pub fn count(&self) -> usize {
        self.intervals.len()
    }
}

/// Relative slack so that a chosen interval passes the solver's own check.
const SLACK: f64 = 1e-9;

/// Running trapezoid sums `P[k] = ∫_{t_0}^{t_k}` of node densities.
fn prefix<T: Real>(dens: &[T], h: T) -> Vec<T> {
    let mut out = Vec::with_capacity(dens.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in dens.windows(2) {
        acc = acc + T::lit(0.5) * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Largest `j > i` with `P[j] − P[i] ≤ budget`, if any.
fn reach<T: Real>(p: &[T], i: usize, budget: T) -> Option<usize> {
    let (mut lo, mut hi) = (i, p.len() - 1);
    if p[hi] - p[i] <= budget {
        return (hi > i).then_some(hi);
    }
    // invariant: lo fits, hi does not
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if p[mid] - p[i] <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > i).then_some(lo)
}

/// Greedy partition of `[0, horizon]` into maximal node intervals on which
/// the X-norms of the free evolution of `data` and of the forcing are both
/// at most `eta`; each maximal end is located by bisection.
pub fn adaptive_partition<T: Real>(
    data: &SpectralState<T>,
    forcing: Option<&FieldPath<T>>,
    horizon: T,
    eta: T,
    opts: &PartitionOptions<T>,
) -> Result<Partition<T>, LwpError> {
    if !(eta > T::zero()) {
        return Err(LwpError::Invalid("eta must be positive".into()));
    }
    let map = DuhamelMap::new(data.grid(), opts.h, opts.p)?;
    let steps = map.steps(T::zero(), horizon)?;
    let exps = map.exponents();
    let mut w = data.clone();
    let mut dens = Vec::with_capacity(steps + 1);
    dens.push(density(map.transform(), &w.u, exps)?);
    for _ in 0..steps {
        map.free_step(&mut w);
        dens.push(density(map.transform(), &w.u, exps)?);
    }
    let pf = prefix(&dens, opts.h);
    let pg = match forcing {
        Some(_) => {
            let psi = map.forcing_window(forcing, T::zero(), steps)?;
            prefix(&densities(map.transform(), &psi, exps)?, opts.h)
        }
        None => vec![T::zero(); steps + 1],
    };
    let budget = eta.powf(exps.q) * T::lit(1.0 - SLACK);
    let mut intervals = Vec::new();
    let mut i = 0;
    while i < steps {
        let t = opts.h * T::lit(i as f64);
        let j = match (reach(&pf, i, budget), reach(&pg, i, budget)) {
            (Some(a), Some(b)) => a.min(b),
            _ => return Err(LwpError::StepTooCoarse { t: t.to_f64_lossy() }),
        };
        intervals.push((t, opts.h * T::lit(j as f64)));
        if intervals.len() > opts.cap {
            return Err(LwpError::LikelyBlowup { t: t.to_f64_lossy(), cap: opts.cap });
        }
        i = j;
    }
    Ok(Partition { intervals, eta })
}

/// Solution assembled interval by interval.
#[derive(Debug, Clone)]
pub struct ChainReport<T> {
    pub path: StatePath<T>,
    pub partition: Partition<T>,
    pub reports: Vec<PicardReport<T>>,
}

/// Global-in-time solution by chaining Picard solves: each interval is the
/// longest on which the free evolution restarted from the current endpoint,
/// and the forcing, have X-norm at most `eta`.
pub fn solve_chain<T: Real>(
    data: &SpectralState<T>,
    forcing: Option<&FieldPath<T>>,
    horizon: T,
    opts: &PartitionOptions<T>,
    picard: &PicardOptions<T>,
) -> Result<ChainReport<T>, LwpError> {
    let map = DuhamelMap::new(data.grid(), opts.h, opts.p)?;
    let steps = map.steps(T::zero(), horizon)?;
    let exps = map.exponents();
    let pg = match forcing {
        Some(_) => {
            let psi = map.forcing_window(forcing, T::zero(), steps)?;
            prefix(&densities(map.transform(), &psi, exps)?, opts.h)
        }
        None => vec![T::zero(); steps + 1],
    };
    let budget = picard.eta.powf(exps.q) * T::lit(1.0 - SLACK);
    let mut states = vec![data.clone()];
    let mut intervals = Vec::new();
    let mut reports = Vec::new();
    let mut i = 0;
    let mut opts_j = picard.clone();
    opts_j.initial = None;
    while i < steps {
        let t = opts.h * T::lit(i as f64);
        let limit = reach(&pg, i, budget).ok_or(LwpError::StepTooCoarse { t: t.to_f64_lossy() })?;
        let start = states.last().expect("nonempty").clone();
        let mut w = start.clone();
        let mut prev = density(map.transform(), &w.u, exps)?;
        let mut acc = T::zero();
        let mut j = i;
        while j < limit {
            map.free_step(&mut w);
            let d = density(map.transform(), &w.u, exps)?;
            acc = acc + T::lit(0.5) * opts.h * (prev + d);
            if acc > budget {
                break;
            }
            prev = d;
            j += 1;
        }
        if j == i {
            return Err(LwpError::StepTooCoarse { t: t.to_f64_lossy() });
        }
        let b = opts.h * T::lit(j as f64);
        let (piece, report) = map.solve(&start, forcing, t, b, &opts_j)?;
        states.extend(piece.states.into_iter().skip(1));
        intervals.push((t, b));
        reports.push(report);
        if intervals.len() > opts.cap {
            return Err(LwpError::LikelyBlowup { t: t.to_f64_lossy(), cap: opts.cap });
        }
        i = j;
    }
    Ok(ChainReport {
        path: StatePath::new(T::zero(), opts.h, states),
        partition: Partition { intervals, eta: picard.eta },
        reports,
    })
}
