//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its domain (negative radius, coupling outside
    /// [0, 1], even grid size, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Loaded quality factor exceeds the intrinsic one, which would imply a
    /// negative coupling efficiency.
    #[error("invalid coupling: q_load = {q_load:e} exceeds q_int = {q_int:e}")]
    InvalidCoupling { q_load: f64, q_int: f64 },

    /// Grid too coarse to resolve the narrowest spectral feature.
    #[error("grid resolution: {0}")]
    GridResolution(String),

    /// Quadrature failed to converge to the requested accuracy.
    #[error("numeric accuracy: achieved {achieved:e}, required {required:e}")]
    NumericAccuracy { achieved: f64, required: f64 },

    /// Two spectral amplitudes live on different grids.
    #[error("grid mismatch between joint spectral amplitudes")]
    GridMismatch,

    /// The maximum of a sampled function sits on the grid boundary, so a
    /// width cannot be measured.
    #[error("peak on grid boundary")]
    PeakOnBoundary,

    /// Requested discrete basis would exceed the desk-scale size bound.
    #[error("dimension overflow: coarse_n = {coarse_n} exceeds {max}")]
    DimensionOverflow { coarse_n: usize, max: usize },

    /// Brute-force state has population outside the four allowed
    /// polarization/bin sectors.
    #[error("support leak: population {leak:e} outside the allowed sectors")]
    SupportLeak { leak: f64 },

    /// Power equalization would require more pump power than allowed.
    #[error("infeasible power: ring {ring_id} requires {required:e} W > max {max:e} W")]
    InfeasiblePower {
        ring_id: u8,
        required: f64,
        max: f64,
    },

    /// Internal consistency violation (should not happen for valid inputs).
    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// numeric-accuracy problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_)
            | Error::InvalidCoupling { .. }
            | Error::DimensionOverflow { .. }
            | Error::InfeasiblePower { .. }
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::GridResolution(_)
            | Error::NumericAccuracy { .. }
            | Error::GridMismatch
            | Error::PeakOnBoundary
            | Error::SupportLeak { .. }
            | Error::Internal(_) => 3,
        }
    }
}
