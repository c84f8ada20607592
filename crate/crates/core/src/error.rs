use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A truncated Fock expansion would drop more probability than allowed.
    #[error("truncation of {what} at n_max = {n_max} discards {tail:.3e} probability (tolerance {tol:.1e})")]
    Truncation {
        what: String,
        n_max: usize,
        tail: f64,
        tol: f64,
    },

    #[error("Bell denominator P+A + P+B = {0:.3e} is degenerate")]
    DegenerateDenominator(f64),

    /// The statistic does not exceed 1 even without noise, so there is no
    /// threshold to search for.
    #[error("no Bell violation at zero noise (S = {s0})")]
    NoViolation { s0: f64 },

    #[error("negative probability {value:.3e} at outcome ({i}, {j})")]
    NegativeProbability { i: i64, j: i64, value: f64 },

    #[error("singular covariance: variance {0} at B is not positive")]
    SingularCovariance(f64),

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
