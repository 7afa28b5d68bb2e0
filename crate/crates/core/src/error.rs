use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("mode dimensions differ: {left} vs {right} amplitudes")]
    DimensionMismatch { left: usize, right: usize },
    #[error("mode {mode} out of range for a {modes}-mode space")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("occupation {occupation} exceeds truncation {dim} in mode {mode}")]
    OccupationOutOfRange { mode: usize, occupation: usize, dim: usize },
    #[error("every mode needs a truncation dimension of at least {min}")]
    TruncationTooSmall { min: usize },
    #[error("raising mode {mode} would leave the truncated space")]
    Truncation { mode: usize },
    #[error("phase index {mu} out of range for s = {s}")]
    PhaseIndexOutOfRange { mu: usize, s: usize },
    #[error("invalid binning: {0}")]
    InvalidBinning(&'static str),
    #[error("correlation {value} lies outside [-1, 1]")]
    CorrelationOutOfRange { value: f64 },
    #[error("scan grid is empty")]
    EmptyGrid,
    #[error("Fock level {n} has no quadrature wavefunction in this truncation")]
    UnsupportedFockLevel { n: usize },
    #[error("detection efficiency {eta} outside (0, 1]")]
    InvalidEfficiency { eta: f64 },
    #[error("numerical accuracy target {tolerance:e} missed (estimate {estimate:e})")]
    Accuracy { estimate: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

impl Error {
    /// Whether the failure comes from a numerical routine rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Accuracy { .. } | Error::CorrelationOutOfRange { .. })
    }
}
