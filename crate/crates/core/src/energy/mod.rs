//! Energy functional and the diagnostics built on it: the Itô drift of the
//! mean energy, pathwise Gronwall envelopes and perturbation scaling.

mod functional;
mod gronwall;
mod ledger;
mod perturbation;

pub(crate) use functional::energy_from_potential;
pub use functional::{energy, energy_parts, EnergyParts};
pub use gronwall::{gronwall_envelope, gronwall_envelope_with_cap, GronwallFit, GRONWALL_C2_CAP};
pub use ledger::{ito_drift_check, ito_drift_check_against, DriftFit, EnergyLedger, ItoVerdict, DRIFT_WINDOW};
pub use perturbation::{perturbation_scaling, PerturbationFit};

use thiserror::Error;

use crate::wave::SolverError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("need at least 2 complete trajectories, got {got}")]
    TooFewTrajectories { got: usize },
    #[error("mean energy series is constant")]
    Degenerate,
    #[error("records disagree: {0}")]
    Mismatch(String),
    #[error("run blew up at t = {t}")]
    BlownUp { t: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid input: {0}")]
    Invalid(String),
}
