//! Linearized fluctuations around the lasing branch: drift and diffusion
//! matrices, spectra, stationary covariances and positive-P trajectories.

mod integrals;
mod model;
mod sde;
mod spectra;

pub use integrals::{
    lyapunov, number_statistics, population_correction, quadrature_variance, stationary_covariance,
    stationary_covariance_lyapunov, Covariance, NumberStatistics, QuadratureVariance, LINEARIZATION_FLAG_RATIO,
    QUAD_REL_TOL,
};
pub use model::{
    build_fluctuation_model, FluctuationModel, NeutralMode, ALPHA, ALPHA_D, BETA, BETA_D, GAMMA, GAMMA_D,
    NEUTRAL_TOL,
};
pub use sde::{
    run_trajectories, sde_trajectories, Estimate, SdeConfig, SdeStatistics, DEFAULT_DIVERGENCE_BOUND,
    MAX_DIVERGENT_FRACTION,
};
pub use spectra::{
    a_entry, correlation_matrix, intensity_difference_spectrum, output_spectrum, q_entry,
    stationary_correlation_matrix, CMatrix6, IntensityDifference, ModeLabel, Spectrum, REALITY_TOL,
};

pub(crate) use integrals::statistics_from;
