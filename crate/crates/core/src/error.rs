use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:.3e} after {evaluations} evaluations")]
    Quadrature {
        a: f64,
        b: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("phonon rate came out negative ({value:.3e} ueV)")]
    NegativeRate { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("generator is not trace-annihilating (max column trace {0:.3e})")]
    NotTracePreserving(f64),

    #[error("non-unique steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("steady-state residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("steady state is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("truncation did not converge below n_max = {cap}")]
    TruncationNotConverged { cap: usize },

    #[error("moment order {m} exceeds photon truncation {n_max}")]
    MomentBeyondTruncation { m: usize, n_max: usize },

    #[error("sweep grids differ: {0}")]
    GridMismatch(String),

    #[error("phase step of {step:.3} rad at omega_L - omega_c = {omega:.4} ueV is ambiguous; refine the grid")]
    PhaseStep { omega: f64, step: f64 },

    #[error("at omega_L - omega_c = {omega} ueV: {source}")]
    SweepPoint {
        omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
