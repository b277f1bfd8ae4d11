use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("projection solver diverged after {iters} iterations (residual {residual:.3e}){context}")]
    SolverDiverged {
        iters: usize,
        residual: f64,
        context: String,
    },

    #[error("point is not on the boundary: |g(y) - 1| = {deviation:.3e} exceeds {tol:.3e}")]
    NotOnBoundary { deviation: f64, tol: f64 },

    #[error("gradient too small for a normal direction: |Dg| = {norm:.3e}")]
    DegenerateGradient { norm: f64 },

    #[error("no samples landed in the shell |g - {level}| <= {bandwidth}")]
    EmptyShell { level: f64, bandwidth: f64 },

    #[error("integrability hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("rejection sampler starved: acceptance rate {rate:.3e} below {min_rate:.3e}")]
    RejectionStarved { rate: f64, min_rate: f64 },

    #[error("chain not mixed: split-chain diagnostic {diagnostic:.4} exceeds {limit}")]
    ChainNotMixed { diagnostic: f64, limit: f64 },

    #[error("sup-norm increments are not monotonically decreasing: {0:?}")]
    NonCauchy(Vec<f64>),

    #[error("fixed-point iteration not contracting: observed ratio {observed:.4} exceeds {allowed:.4}")]
    NotContracting { observed: f64, allowed: f64 },

    #[error("lambda = {lambda} is not above the perturbation threshold lambda_0 = {lambda0}")]
    SubcriticalLambda { lambda: f64, lambda0: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
