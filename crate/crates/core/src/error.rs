use thiserror::Error;

/// Errors produced by the walk, band, bound-state and spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid coin angle {0}: must be finite")]
    InvalidAngle(f64),

    #[error("length mismatch: state has {state} sites, profile has {profile}")]
    LengthMismatch { state: usize, profile: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("band gap closed: {0}")]
    GapClosed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dispersion relation violated: residual {0:e}")]
    DispersionViolated(f64),

    #[error("energy {energy} lies outside the bound-state window ({reason})")]
    OutsideWindow { energy: f64, reason: String },

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("ring of {n_sites} sites too small: tail amplitude {tail:e} at the seam")]
    RingTooSmall { n_sites: usize, tail: f64 },

    #[error("root bracket [{lo}, {hi}] has no sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("winding phase step {step} exceeds π/2 even with {grid_points} points")]
    WindingUnresolved { step: f64, grid_points: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("no eigenvector within {tolerance:e} of quasi-energy {energy}")]
    NoMatchingEigenvector { energy: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
