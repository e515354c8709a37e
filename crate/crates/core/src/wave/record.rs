use crate::lwp::XExponents;
use crate::scalar::Real;
use crate::spectral::SpectralState;

/// Diagnostics of one trajectory sampled every `save_every` steps.
///
/// `x_increments[k]` is `∫ ‖u‖_{L^r}^q dt` over `[times[k−1], times[k]]`
/// (zero at `k = 0`); see [`crate::lwp::XExponents`].
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<T> {
    pub trajectory: u64,
    pub seed: u64,
    pub times: Vec<T>,
    /// `E(u, ∂ₜu)` of the full solution `u = v + Ψ`
    pub energy_u: Vec<T>,
    /// `E(v, ∂ₜv)`
    pub energy_v: Vec<T>,
    /// `‖u‖_{H¹}`
    pub h1_u: Vec<T>,
    /// `‖∂ₜu‖_{L²}`
    pub l2_ut: Vec<T>,
    /// collocation `sup |u|`
    pub sup_u: Vec<T>,
    /// collocation `sup |Ψ|` (zero without noise)
    pub sup_psi: Vec<T>,
    pub x_increments: Vec<T>,
    /// Exponents behind `x_increments`; `None` below dimension 3.
    pub x_exponents: Option<XExponents<T>>,
    /// Time of the first sup-norm or non-finite failure.
    pub blow_up: Option<T>,
    /// Snapshots of `(u, ∂ₜu)`, kept only when requested.
    pub states: Vec<SpectralState<T>>,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn new(trajectory: u64, seed: u64) -> Self {
        Self {
            trajectory,
            seed,
            times: Vec::new(),
            energy_u: Vec::new(),
            energy_v: Vec::new(),
            h1_u: Vec::new(),
            l2_ut: Vec::new(),
            sup_u: Vec::new(),
            sup_psi: Vec::new(),
            x_increments: Vec::new(),
            x_exponents: None,
            blow_up: None,
            states: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn blown_up(&self) -> bool {
        self.blow_up.is_some()
    }

    /// Running `X([0, t_k])`; empty when no exponents are attached.
    pub fn running_x(&self) -> Vec<T> {
        match self.x_exponents {
            Some(x) => self.cumulative_x().into_iter().map(|c| c.powf(T::one() / x.q)).collect(),
            None => Vec::new(),
        }
    }

    /// Running `X([0, t_k])^q`.
    pub fn cumulative_x(&self) -> Vec<T> {
        self.x_increments
            .iter()
            .scan(T::zero(), |acc, &x| {
                *acc = *acc + x;
                Some(*acc)
            })
            .collect()
    }
}
