use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("Hilbert-space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("steady state is not unique ({detail})")]
    DegenerateNullspace { detail: String },

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("steady state has eigenvalue {min_eig:e} below the positivity tolerance")]
    NotPositive { min_eig: f64 },

    #[error("time step {dt} too coarse: dt * max_rate = {product} > {limit}")]
    StepSize { dt: f64, product: f64, limit: f64 },

    #[error("trace drifted by {drift:e} during integration")]
    TraceDrift { drift: f64 },

    #[error("normalization drifted by {drift:e} during integration")]
    NormalizationDrift { drift: f64 },

    #[error("top-edge probability {mass:e} exceeds {limit:e}")]
    TailMass { mass: f64, limit: f64 },

    #[error("coupling too weak: eta^2 = {eta_sq} <= kappa_a*kappa_bc = {bound}; no lasing branch")]
    CouplingTooWeak { eta_sq: f64, bound: f64 },

    #[error("operating point is below threshold: {0}")]
    BelowThreshold(String),

    #[error("drift matrix is not stable (max Re lambda = {max_re:e})")]
    NotHurwitz { max_re: f64 },

    #[error("-i omega - M is singular at omega = {omega}")]
    Singular { omega: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("{diverged} of {total} trajectories diverged ({fraction:.4} > {limit})")]
    Divergence {
        diverged: usize,
        total: usize,
        fraction: f64,
        limit: f64,
    },

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
