//! Itô integration of phase-space SDEs by Euler–Maruyama, with Jacobian
//! co-propagation, reproducible ensembles and linear-model oracles.

mod convergence;
mod csv;
mod ensemble;
mod integrator;
mod linear;
mod rng;
mod system;

use thiserror::Error;

pub use convergence::{det_j_order_study, empirical_order, strong_order_study, CanonicalityReport, StrongOrderReport};
pub use csv::{write_csv_header, write_trajectory_csv, write_trajectory_rows};
pub use ensemble::{
    expected_det_j, simulate_ensemble, simulate_ensemble_with_threads, simulate_paths, simulate_system_ensemble,
    DetJStats, EnsembleSummary,
};
pub use integrator::{path_end, simulate_path, simulate_system_path, IntegratorConfig, PathEnd, Trajectory};
pub use linear::{exact_linear_moments, propagator, LinearTransition};
pub use rng::path_rng;
pub use system::{em_step, Powers, SdeSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdeError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} Wiener increments, got {got}")]
    IncrementCount { expected: usize, got: usize },
    #[error("non-finite state or increment")]
    NonFiniteInput,
    #[error("numerical blow-up at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },
    #[error("path {path} failed: {source}")]
    PathFailed { path: u64, source: Box<SdeError> },
}
