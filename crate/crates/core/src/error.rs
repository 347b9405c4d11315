//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel scale must be positive, got {0}")]
    InvalidScale(f64),

    #[error("acceptance draw must lie in (0, 1], got {0}")]
    InvalidAcceptanceDraw(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("summary coordinate {index} has zero variance")]
    DegenerateCoordinate { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown model id `{0}`")]
    UnknownModel(String),

    #[error("model `{model}` has no summary scheme `{scheme}`")]
    UnknownScheme { model: String, scheme: String },

    #[error("unknown kernel family `{0}`")]
    UnknownKernel(String),

    #[error("unknown distance metric `{0}`")]
    UnknownMetric(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("statistic undefined: {0}")]
    UndefinedStatistic(&'static str),

    #[error("sequence table parse error at line {line}: {message}")]
    SeqParse { line: usize, message: String },

    #[error("envelope violation: target/proposal ratio {ratio} exceeds the envelope constant")]
    EnvelopeViolation { ratio: f64 },

    #[error("simulation budget exhausted after {sims_used} simulator calls ({accepted} accepted): {context}")]
    BudgetExceeded {
        sims_used: u64,
        accepted: usize,
        context: String,
    },

    #[error("adaptive sampler budget exhausted after {sims_used} simulator calls at h = {h}")]
    AdaptiveBudget {
        sims_used: u64,
        h: f64,
        particles: Vec<crate::samplers::Particle>,
    },

    #[error("quadrature failed to reach tolerance: achieved {achieved:e}, requested {requested:e}")]
    QuadratureTolerance { achieved: f64, requested: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("count window excludes every attainable count")]
    DegenerateMixture,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
