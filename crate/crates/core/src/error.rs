use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// A structural invariant failed; `path` names the offending field,
    /// e.g. `outcomes.2.1.values`.
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    /// Exact enumeration refused: the assignment count is over the cap.
    #[error("enumeration cap exceeded: {required} assignments required, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },

    #[error("outcome space at site {site}, setting {setting} is not normalized to min -1, max +1: {detail}")]
    NotNormalized {
        site: usize,
        setting: usize,
        detail: String,
    },

    #[error(
        "degenerate outcome space at site {site}, setting {setting}: one value cannot span [-1, 1]"
    )]
    DegenerateOutcomeSpace { site: usize, setting: usize },

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("face count overflows 128-bit integers for d={d}, l={l}")]
    FaceCountOverflow { d: u32, l: u32 },

    #[error("feasibility cap exceeded: {0}")]
    FeasibilityCapExceeded(String),

    /// Signaling behaviors are outside the LHV membership question entirely;
    /// they are reported as this error, not as a NotLhv verdict.
    #[error("behavior is signaling: max marginal deviation {max_deviation:.3e} exceeds tolerance {tolerance:.0e}")]
    SignalingBehavior { max_deviation: f64, tolerance: f64 },

    #[error("simplex iteration limit reached; the feasibility system is numerically degenerate")]
    SimplexStalled,

    #[error("matrix is not Hermitian: max |A - A^H| entry is {deviation:.3e} (tolerance {tolerance:.0e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("operator norm {norm} exceeds 1 beyond tolerance")]
    OperatorNormExceeded { norm: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("matrix dimension {dim} exceeds cap {cap}")]
    MatrixCapExceeded { dim: usize, cap: usize },

    #[error("expectation value has non-negligible imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
