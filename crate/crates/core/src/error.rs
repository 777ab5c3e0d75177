use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown kernel `{0}` (expected one of product, half_sq_diff, abs_diff, sign_sum, diff, sign_diff)")]
    UnknownKernel(String),
    #[error("sample has {n} observations; at least {min} are required")]
    SampleTooSmall { n: usize, min: usize },
    #[error("observation {index} is not finite")]
    NonFiniteObservation { index: usize },
    #[error("jackknife variance estimate is degenerate ({0:e})")]
    DegenerateVariance(f64),
    #[error("sigma must be positive, got {0}")]
    NonpositiveSigma(f64),
    #[error("kernel `{0}` has no analytic projection for this scenario")]
    MissingAnalyticProjection(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("grid size {0} must be a power of two and at least 2")]
    BadGrid(usize),
    #[error("limit law does not match the test: {0}")]
    LawMismatch(String),
    #[error("limit law carries no simulated sups; {0} needs them")]
    LawWithoutSamples(&'static str),
    #[error("bad scenario: {0}")]
    BadScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
