use thiserror::Error;

/// Errors shared across the solver kit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid range: lo = {lo} must be strictly below hi = {hi}")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("map domain violation: {quantity} = {value:.6e}")]
    MapDomain { quantity: &'static str, value: f64 },

    #[error("projection did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    ProjectionNonConvergence { sweeps: usize, residual: f64 },

    #[error("feasible set is empty or certification failed (violation {violation:.3e})")]
    InfeasibleSet { violation: f64 },

    #[error("prox subproblem did not converge after {iters} iterations (residual {residual:.3e})")]
    ProxNonConvergence { iters: usize, residual: f64 },

    #[error("coordinate {coord} = {value} lies outside the distance generator domain")]
    GeneratorDomain { coord: usize, value: f64 },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("rate bound undefined: sigma * gamma0 = {sigma_gamma0} must exceed 1")]
    BoundUndefined { sigma_gamma0: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no sampled pair satisfied the premise; estimate unavailable")]
    EstimateUnavailable,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("instance generation failed for {family}: {reason}")]
    Generation { family: &'static str, reason: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),

    #[error("solver aborted at iteration {iteration}: {source}")]
    AtIteration {
        iteration: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach the solver iteration at which the error occurred.
    pub fn at_iteration(self, iteration: u64) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }

    /// True for errors that indicate a misconfigured run rather than a
    /// failed instance (drives the CLI exit code).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parameter(_) | Error::UnknownScheme(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
