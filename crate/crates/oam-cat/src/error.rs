use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error("grid too small for the requested mode: {0}")]
    GridTooSmall(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has zero power")]
    ZeroPower,

    #[error("mode truncation insufficient: tail mass {tail:.3e} exceeds 1e-8 at l_max = {l_max}")]
    TruncationInsufficient { tail: f64, l_max: usize },

    #[error("degenerate cat state: |alpha| = 0 with theta = pi has no normalizable field")]
    DegenerateCat,

    #[error(
        "aliasing bound violated: max frequency x wavelength x distance = {shift:.3e} m \
         exceeds half extent {half_extent:.3e} m"
    )]
    AliasingBound { shift: f64, half_extent: f64 },

    #[error(
        "diffraction orders overlap: target bandwidth {bandwidth:.3e} /m exceeds \
         {limit:.3e} /m for grating period {period:.3e} m"
    )]
    OrderOverlap { bandwidth: f64, limit: f64, period: f64 },

    #[error("field amplitude vanishes on the winding-number path")]
    AmplitudeNullOnPath,

    #[error("phase-space grid range too small or normalization check failed: {0}")]
    GridRange(String),

    #[error("dimension {0} is not prime")]
    NonPrimeDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inconsistent probabilities: row {row} sums to {sum} (expected 1 within 1e-6)")]
    InconsistentProbabilities { row: usize, sum: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for configuration
    /// problems, 3 for violated numerical contracts, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::NonPrimeDimension(_)
            | Error::DimensionMismatch { .. } => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
