//! Brute-force master equation on a truncated three-mode Fock space.

mod liouvillian;
mod observables;
mod operators;
mod solve;
mod state;

pub use liouvillian::{build_liouvillian, Superoperator};
pub use observables::{observables, ObservableSet, G2_MIN_MEAN, TAIL_TOL};
pub use operators::{build_mode_operator, Mode};
pub use solve::{evolve, steady_state, SteadyState, POSITIVITY_TOL, RESIDUAL_TOL, STEP_LIMIT, TRACE_DRIFT_TOL};
pub use state::DensityMatrix;
