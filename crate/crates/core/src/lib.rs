//! Simulator for the atom-photon pair laser.
//!
//! Three cross-checking routes to the same physics:
//!
//! - [`fock`]: brute-force Lindblad master equation on a truncated
//!   three-mode Fock space.
//! - [`rate_eq`]: the joint photon/atom rate equation obtained after
//!   adiabatic elimination of the source mode, plus its analytic moments.
//! - [`semiclassical`] and [`fluctuations`]: mean-field branch of the
//!   coherently pumped model, linearized noise spectra and positive-P
//!   trajectories.
//!
//! [`harness`] wires these into scenario runs and figure recipes.
//!
//! Conventions: ħ = 1, every κ is an amplitude decay rate (intensities decay
//! at 2κ), and the model is written in the resonant rotating frame.

pub mod error;
pub mod fluctuations;
pub mod fock;
pub mod harness;
pub mod params;
pub mod rate_eq;
pub mod semiclassical;
pub mod sparse;

pub use error::{Error, Result};
pub use params::{ModelParams, PumpModel, Truncation};
