use alloc::string::String;

/// Errors raised by the algebra, geometry and phase routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("number of modes must be 2 or 3, got {0}")]
    InvalidModeCount(usize),
    #[error("occupation cutoff n_max must be at least 1, got {0}")]
    CutoffTooSmall(usize),
    #[error("mode {mode} out of range for a {num_modes}-mode space")]
    ModeOutOfRange { mode: usize, num_modes: usize },
    #[error("operation requires a 3-mode space, got {0} modes")]
    RequiresThreeModes(usize),
    #[error("expected a unit vector, got norm {0}")]
    NonUnitVector(f64),
    #[error("photon numbers n_R={n_r}, n_L={n_l} do not fit under cutoff n_max={n_max}")]
    CutoffOverflow { n_r: usize, n_l: usize, n_max: usize },
    #[error("operands live on different Fock spaces")]
    SpaceMismatch,
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("degenerate path: samples {0} and {1} coincide")]
    DegeneratePath(usize, usize),
    #[error("tangent trace is not closed (gap {0:.3e})")]
    OpenTrace(f64),
    #[error("time {0} lies outside the trajectory grid")]
    TimeOutOfRange(f64),
    #[error("time {0} is not a grid point of the trajectory")]
    OffGrid(f64),
    #[error("polar angle {0} outside [0, pi]")]
    AngleOutOfRange(f64),
    #[error("step guard violated: max |H_eff| dt = {metric:.4e} (limit {limit})")]
    StepGuard { metric: f64, limit: f64 },
    #[error("evolution needs an odd number of samples >= 3, got {0}")]
    GridParity(usize),
    #[error("overlap magnitude {0:.3e} too small, phase is ill-conditioned")]
    IllConditioned(f64),
    #[error("angular frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
}

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;
