use thiserror::Error;

/// Errors raised by the geometry kernel and everything layered on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain")]
    OutsideChart { point: Vec<f64> },

    #[error("geodesic left the chart domain at t = {t:.6}")]
    DomainEscape { t: f64 },

    #[error("tangent vector length {length:.6} is not below the injectivity radius bound {bound:.6}")]
    BeyondInjectivity { length: f64, bound: f64 },

    #[error("geodesic shooting did not converge after {iterations} iterations (residual {residual:.3e})")]
    ShootingFailed { iterations: usize, residual: f64 },

    #[error("endpoints are (numerically) conjugate: smallest singular value {sigma_min:.3e}")]
    ConjugatePoints { sigma_min: f64 },

    #[error("degenerate plane: vectors are (numerically) parallel")]
    DegeneratePlane,

    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {eig:.3e})")]
    MetricNotPositive { point: Vec<f64>, eig: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("comparison-field degeneracy: sin(k l) vanishes for k l = {kl:.6}")]
    ComparisonDegenerate { kl: f64 },

    #[error("sample grids do not match: {0}")]
    GridMismatch(String),

    #[error("rank-deficient sample geometry for quadratic fit; deficient directions: {directions:?}")]
    RankDeficient { directions: Vec<String> },

    #[error("not enough samples for a quadratic fit: need {needed}, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("no samples in the punctured neighborhood")]
    EmptyNeighborhood,

    #[error("no admissible pairs for the doubled maximization")]
    NoAdmissiblePairs,

    #[error("input rejected: {0}")]
    Rejected(String),

    #[error("time sample t = {t} is at or past the horizon T = {horizon}")]
    PastHorizon { t: f64, horizon: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
